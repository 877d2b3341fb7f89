#include "race/variance.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "race/lfun.hpp"

namespace race {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kZeta2 = kPi * kPi / 6.0;
constexpr double kLog2Pi = 1.83787706640934548356065947282711;

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return std::round(r);
}

// Lambda(q/(q,d)) / phi(q/(q,d)) for an arbitrary integer difference d.
double lambda_over_phi(int64_t q, int64_t d) {
    int64_t g = gcd64(((d % q) + q) % q, q);
    if (g == 0) g = q;
    int64_t m = q / g;
    if (m == 1) return 0.0;
    return von_mangoldt(m) / static_cast<double>(phi_from_factors(factorize(m)));
}

double sum_logp_over_p_minus_1(const ModulusContext& ctx) {
    double s = 0.0;
    for (const auto& f : ctx.factors)
        s += std::log(static_cast<double>(f.p)) / (f.p - 1);
    return s;
}

// a^i b^{-i} mod q for i of either sign (r1 = a b^{-1}, r2 = b a^{-1}).
int64_t power_ratio(const ModulusContext& ctx, const ResiduePair& pair, int i) {
    int64_t base = i >= 0 ? pair.r1 % ctx.q : pair.r2 % ctx.q;
    return pow_mod(base, std::abs(i), ctx.q);
}

// a^i - b^i mod q for i of either sign.
int64_t power_difference(const ModulusContext& ctx, const ResiduePair& pair,
                         int i) {
    int64_t a = pair.a % ctx.q, b = pair.b % ctx.q;
    if (i < 0) {
        a = inv_mod(a, ctx.q);
        b = inv_mod(b, ctx.q);
    }
    int64_t ai = pow_mod(a, std::abs(i), ctx.q);
    int64_t bi = pow_mod(b, std::abs(i), ctx.q);
    return ((ai - bi) % ctx.q + ctx.q) % ctx.q;
}

void require_distinct(const ModulusContext& ctx, int64_t a, int64_t b) {
    ctx.require_race_capable();
    if (((a - b) % ctx.q + ctx.q) % ctx.q == 0)
        throw std::invalid_argument("distinct residues required");
}

}  // namespace

// -----------------------------------------------------------------------------
// M* and V
// -----------------------------------------------------------------------------

MStarResult M_star_lvalues(const CharacterGroup& g, const ResiduePair& pair) {
    MStarResult out;
    for (const auto& chi : g.characters()) {
        if (chi.is_principal()) continue;
        double w = std::norm(chi(pair.a) - chi(pair.b));
        if (w < 1e-14) continue;
        auto star = CharacterGroup::primitive_lift(chi);
        const auto& bundle = L_derivatives_at_1(star);
        cplx l1 = bundle.L1 / bundle.L;
        out.value += w * l1.real();
        out.error_bound +=
            w * bundle.err * (1.0 + std::abs(l1)) / std::abs(bundle.L);
    }
    out.error_bound += 1e-12 * std::abs(out.value);
    return out;
}

MStarResult M_star_arithmetic(const CharacterGroup& g, const ResiduePair& pair,
                              double y) {
    const auto& ctx = g.context();
    int64_t q = ctx.q;
    int64_t cutoff = static_cast<int64_t>(y);
    auto primes = primes_up_to(cutoff);
    int64_t t1 = pair.r1 % q, t2 = pair.r2 % q;
    double s = 0.0;
    for (int64_t p : primes) {
        double lp = std::log(static_cast<double>(p));
        for (int64_t pe = p; pe <= cutoff;) {
            int64_t r = pe % q;
            if (r == t1 || r == t2 || r == 1) {
                double term = lp / static_cast<double>(pe);
                if (r == t1) s += term;
                if (r == t2) s += term;
                if (r == 1) s -= 2.0 * term;
            }
            if (pe > cutoff / p) break;
            pe *= p;
        }
    }
    double phi = static_cast<double>(ctx.phi);
    auto hv = H_and_H0(ctx, pair);
    MStarResult out;
    out.value = phi * s + phi * hv.H0;
    double lqy = std::log(static_cast<double>(q) * y);
    out.error_bound = phi * lqy * lqy / std::sqrt(y);
    out.heuristic = true;
    return out;
}

VarianceReport variance_V(int64_t q, int64_t a, int64_t b,
                          VarianceMethod method, double y) {
    auto g = CharacterGroup::get(q);
    const auto& ctx = g->context();
    require_distinct(ctx, a, b);
    auto pair = ResiduePair::make(ctx, a, b);
    double phi2 = 2.0 * static_cast<double>(ctx.phi);

    VarianceReport rep;
    rep.q = q;
    rep.pair = pair;
    rep.method = method;
    rep.comp_scriptL = phi2 * script_L(ctx);
    rep.comp_K = phi2 * K_q(q, a - b);
    rep.comp_iota = phi2 * iota(q, -pair.r1) * std::log(2.0);
    switch (method) {
        case VarianceMethod::lvalues: {
            auto ms = M_star_lvalues(*g, pair);
            rep.comp_Mstar = 2.0 * ms.value;
            rep.error_bound = 2.0 * ms.error_bound;
            rep.V = rep.comp_scriptL + rep.comp_K + rep.comp_iota + rep.comp_Mstar;
            break;
        }
        case VarianceMethod::arithmetic: {
            if (y <= 0.0) y = static_cast<double>(q) * q;
            auto ms = M_star_arithmetic(*g, pair, y);
            rep.comp_Mstar = 2.0 * ms.value;
            rep.error_bound = 2.0 * ms.error_bound;
            rep.V = rep.comp_scriptL + rep.comp_K + rep.comp_iota + rep.comp_Mstar;
            break;
        }
        case VarianceMethod::zeros: {
            double v = 0.0;
            for (const auto& chi : g->characters()) {
                if (chi.is_principal()) continue;
                double w = std::norm(chi(a) - chi(b));
                if (w < 1e-14) continue;
                v += w * b_chi_closed(chi);
            }
            rep.V = v;
            rep.comp_Mstar = v - rep.comp_scriptL - rep.comp_K - rep.comp_iota;
            rep.error_bound = 1e-10 * std::abs(v);
            break;
        }
    }
    return rep;
}

// -----------------------------------------------------------------------------
// U and V+
// -----------------------------------------------------------------------------

double U_second_cumulant(int64_t q, int64_t a, int64_t b) {
    auto g = CharacterGroup::get(q);
    const auto& ctx = g->context();
    require_distinct(ctx, a, b);
    auto pair = ResiduePair::make(ctx, a, b);
    double phi = static_cast<double>(ctx.phi);
    int64_t c1 = pair.r1 % q;                 // a b^{-1}
    int64_t c2 = mul_mod(c1, c1, q);          // a^2 b^{-2}

    double t1 = 0.5 * phi * (3.0 + iota(q, c2)) *
                (std::log(static_cast<double>(q)) - kLog2Pi - euler_gamma -
                 sum_logp_over_p_minus_1(ctx) - 0.5 * kZeta2);
    double t2 = 0.5 * phi *
                (4.0 * lambda_over_phi(q, a - b) -
                 lambda_over_phi(q, a * a - b * b) -
                 (iota(q, -c2) - 4.0 * iota(q, -c1)) *
                     (std::log(2.0) + 0.25 * kZeta2));
    double t3 = 0.0;
    for (const auto& chi : g->characters()) {
        if (chi.is_principal()) continue;
        double w = std::norm(chi(a) - chi(b));
        if (w < 1e-14) continue;
        const auto& bun = L_derivatives_at_1(CharacterGroup::primitive_lift(chi));
        cplx l1 = bun.L1 / bun.L;
        cplx l2 = bun.L2 / bun.L;
        t3 += w * w * std::real(2.0 * l1 - l2 + l1 * l1);
    }
    return t1 + t2 + 0.25 * t3;
}

double U_via_higher_order_terms(int64_t q, int64_t a, int64_t b) {
    auto g = CharacterGroup::get(q);
    const auto& ctx = g->context();
    require_distinct(ctx, a, b);
    auto pair = ResiduePair::make(ctx, a, b);
    double phi = static_cast<double>(ctx.phi);
    double A = weighted_char_sum(*g, pair, 2, 1);      // sum |chi(a)-chi(b)|^4
    double B = weighted_char_sum(*g, pair, 2, q - 1);  // ... chi(-1) weighted
    double w2v_over_phi =
        0.25 * script_L_n(*g, pair, 2) -
        (0.25 / phi) * (A * (euler_gamma + std::log(2.0) + 0.5 * kZeta2) +
                        B * (std::log(2.0) + 0.25 * kZeta2)) +
        0.5 * (M_nj(*g, pair, 2, 1, false) + H_nj(ctx, pair, 2, 1)) -
        0.25 * (M_nj(*g, pair, 2, 2, false) + H_nj(ctx, pair, 2, 2));
    return phi * w2v_over_phi;
}

double variance_plus(int64_t q, int64_t a, int64_t b) {
    auto g = CharacterGroup::get(q);
    const auto& ctx = g->context();
    ctx.require_race_capable();
    if (!ctx.is_reduced(a) || !ctx.is_reduced(b))
        throw std::invalid_argument("variance_plus: residues not reduced");
    int64_t c1 = mul_mod(ctx.reduce(a), inv_mod(ctx.reduce(b), q), q);
    double phi = static_cast<double>(ctx.phi);
    double arith = std::log(static_cast<double>(q)) -
                   sum_logp_over_p_minus_1(ctx) - von_mangoldt(q) / phi -
                   (euler_gamma + kLog2Pi) - K_q(q, a - b) -
                   iota(q, -c1) * std::log(2.0);
    double mplus = 0.0;
    for (const auto& chi : g->characters()) {
        if (chi.is_principal()) continue;
        double w = std::norm(chi(a) + chi(b));
        if (w < 1e-14) continue;
        mplus += w * logderiv_primitive(chi).real();
    }
    // The additive constant removes the principal character from the closed
    // per-character evaluation: its weight is |chi0(a)+chi0(b)|^2 = 4 and its
    // conductor-1 block contributes -(gamma0 + log 4 pi).
    return 2.0 * phi * arith + 2.0 * mplus +
           4.0 * (euler_gamma + std::log(4.0 * M_PI));
}

// -----------------------------------------------------------------------------
// Delta and ratings
// -----------------------------------------------------------------------------

DeltaBreakdown delta_discriminant(int64_t q, int64_t a, int64_t b) {
    auto ctx = ModulusContext::make(q);
    require_distinct(ctx, a, b);
    auto pair = ResiduePair::make(ctx, a, b);
    DeltaBreakdown d;
    d.K_term = K_q(q, a - b);
    d.iota_term = iota(q, -pair.r1) * std::log(2.0);
    d.lambda_r1 = von_mangoldt(pair.r1) / static_cast<double>(pair.r1);
    d.lambda_r2 = von_mangoldt(pair.r2) / static_cast<double>(pair.r2);
    d.H_term = H_and_H0(ctx, pair).H;
    d.total = d.K_term + d.iota_term + d.lambda_r1 + d.lambda_r2 + d.H_term;
    return d;
}

Rational Rational::make(int64_t num, int64_t den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    int64_t g = gcd64(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return Rational{num, den};
}

namespace {

// n = p^e with e >= 1?  (n >= 2)
bool prime_power(int64_t n, int64_t* p, int* e) {
    if (n < 2) return false;
    auto f = factorize(n);
    if (f.size() != 1) return false;
    *p = f[0].p;
    *e = f[0].e;
    return true;
}

}  // namespace

double rating(const Rational& r, const Rational& s) {
    double log2 = std::log(2.0);
    if (s.is_integer()) {
        if (r.is_integer() && r.num == -1) return log2;
        int64_t p;
        int j;
        if (r.is_integer() && prime_power(r.num, &p, &j))
            return std::log(static_cast<double>(p)) / std::pow(p, j);
        return 0.0;
    }
    int64_t p;
    int k;
    if (!prime_power(s.den, &p, &k)) return 0.0;
    double lp = std::log(static_cast<double>(p));
    int64_t pp;
    int j;
    if (r.is_integer() && prime_power(r.num, &pp, &j) && pp == p) {
        int64_t pjk = 1;
        for (int i = 0; i < j + k; ++i) pjk *= p;
        return lp / static_cast<double>(phi_from_factors(factorize(pjk)));
    }
    int64_t pk = 1;
    for (int i = 0; i < k; ++i) pk *= p;
    if (r.is_integer() && r.num == 1)
        return lp / static_cast<double>(phi_from_factors(factorize(pk)));
    if (r.num == 1 && prime_power(r.den, &pp, &j) && pp == p) {
        if (j < k)
            return lp / static_cast<double>(phi_from_factors(factorize(pk)));
        if (j == k) return lp / static_cast<double>(pk);
    }
    return 0.0;
}

bool in_Q_rs(const Rational& r, const Rational& s, int64_t q) {
    if (q < 3) return false;
    // a = r + s q = (r.num s.den + s.num q r.den) / (r.den s.den)
    __int128 num = static_cast<__int128>(r.num) * s.den +
                   static_cast<__int128>(s.num) * q * r.den;
    __int128 den = static_cast<__int128>(r.den) * s.den;
    if (num % den != 0) return false;
    int64_t a = static_cast<int64_t>(((num / den) % q + q) % q);
    auto ctx = ModulusContext::make(q);
    if (a == 0 || gcd64(a, q) != 1) return false;
    return !ctx.is_square(a);
}

std::vector<RatingResidual> rating_limit_residuals(
    const Rational& r, const Rational& s, const std::vector<int64_t>& q_list) {
    double R = rating(r, s);
    std::vector<RatingResidual> out;
    for (int64_t q : q_list) {
        if (!in_Q_rs(r, s, q))
            throw std::invalid_argument("rating_limit_residuals: q=" +
                                        std::to_string(q) + " not in Q(r,s)");
        __int128 num = static_cast<__int128>(r.num) * s.den +
                       static_cast<__int128>(s.num) * q * r.den;
        __int128 den = static_cast<__int128>(r.den) * s.den;
        int64_t a = static_cast<int64_t>(((num / den) % q + q) % q);
        out.push_back({q, delta_discriminant(q, a, 1).total - R});
    }
    return out;
}

// -----------------------------------------------------------------------------
// Higher-order arithmetic terms
// -----------------------------------------------------------------------------

double script_L_n(const CharacterGroup& g, const ResiduePair& pair, int n) {
    const auto& ctx = g.context();
    double base = std::log(static_cast<double>(ctx.q) / kPi) -
                  sum_logp_over_p_minus_1(ctx);
    double s = 0.0;
    for (int i = -n; i <= n; ++i) {
        double c = (i % 2 == 0 ? 1.0 : -1.0) * binom(2 * n, n + i);
        int io = iota(ctx.q, power_ratio(ctx, pair, i));
        double term = io * base;
        if (!io)
            term -= lambda_over_phi(ctx.q, power_difference(ctx, pair, i));
        s += c * term;
    }
    return s;
}

double M_nj(const CharacterGroup& g, const ResiduePair& pair, int n, int j,
            bool primitive) {
    if (j < 1 || j > 2 || n < j)
        throw std::invalid_argument("M_nj: need 1 <= j <= n, j <= 2");
    double s = 0.0;
    for (const auto& chi : g.characters()) {
        if (chi.is_principal()) continue;
        double w = std::pow(std::norm(chi(pair.a) - chi(pair.b)), n);
        if (w < 1e-14) continue;
        cplx d;
        if (primitive) {
            const auto& b = L_derivatives_at_1(CharacterGroup::primitive_lift(chi));
            cplx l1 = b.L1 / b.L;
            d = (j == 1) ? l1 : b.L2 / b.L - l1 * l1;
        } else {
            auto ld = log_derivatives(chi);
            d = (j == 1) ? ld.l1 : ld.l2 - ld.l1 * ld.l1;
        }
        s += w * d.real();
    }
    return s / static_cast<double>(g.context().phi);
}

double geometric_power_sum(int64_t p, int64_t r, int64_t s, int m) {
    if (p < 2 || r < 1 || s < 1 || r > s || m < 0 || m > 4)
        throw std::invalid_argument("geometric_power_sum: bad arguments");
    // Stirling numbers of the second kind S(g, l), g <= 4
    static const double S2[5][5] = {{1, 0, 0, 0, 0},
                                    {0, 1, 0, 0, 0},
                                    {0, 1, 1, 0, 0},
                                    {0, 1, 3, 1, 0},
                                    {0, 1, 7, 6, 1}};
    static const double fact[5] = {1, 1, 2, 6, 24};
    double lp = std::log(static_cast<double>(p));
    double ps_minus_1 = std::expm1(s * lp);  // p^s - 1 (inf-safe for huge s)
    double outer = 0.0;
    for (int g = 0; g <= m; ++g) {
        double inner = 0.0;
        for (int l = 0; l <= g; ++l)
            inner += S2[g][l] * fact[l] / std::pow(ps_minus_1, l);
        outer += binom(m, g) * std::pow(static_cast<double>(s), g) *
                 std::pow(static_cast<double>(r), m - g) * inner;
    }
    double front = std::exp(-r * lp) / (1.0 - std::exp(-s * lp));
    return front * outer;
}

double H_nj(const ModulusContext& ctx, const ResiduePair& pair, int n, int j) {
    if (j < 1 || j > n)
        throw std::invalid_argument("H_nj: need 1 <= j <= n");
    double total = 0.0;
    for (const auto& f : ctx.factors) {
        int64_t pnu = 1;
        for (int i = 0; i < f.e; ++i) pnu *= f.p;
        double lp = std::log(static_cast<double>(f.p));
        int64_t e1 = e_qpr(ctx, f.p, 1);
        double inner = 0.0;
        for (int i = -n; i <= n; ++i) {
            int64_t ci = power_ratio(ctx, pair, i);
            int64_t er = e_qpr(ctx, f.p, ci);
            if (er == e_infinite) continue;
            int64_t r0 = (er - 1) % e1 + 1;
            double S = geometric_power_sum(f.p, r0, e1, j - 1);
            inner += (i % 2 == 0 ? 1.0 : -1.0) * binom(2 * n, n + i) * S;
        }
        double phpnu = static_cast<double>(phi_from_factors(factorize(pnu)));
        total += std::pow(lp, j) / phpnu * inner;
    }
    return (j % 2 == 0 ? 1.0 : -1.0) * total;
}

}  // namespace race
