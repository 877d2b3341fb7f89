#include "race/lfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace race {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// B_2, B_4, ..., B_16; eight correction terms are plenty at s = 1 with K = 48.
constexpr std::array<double, 8> kBernoulli = {
    1.0 / 6.0,   -1.0 / 30.0,     1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0,  -691.0 / 2730.0, 7.0 / 6.0,  -3617.0 / 510.0};

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// 16-point Gauss-Legendre on [-1, 1]; used for the McCurley tail integrals.
constexpr std::array<double, 8> kGL16x = {
    0.09501250983763744, 0.28160355077925891, 0.45801677765722739,
    0.61787624440264375, 0.75540440835500303, 0.86563120238783174,
    0.94457502307323258, 0.98940093499164993};
constexpr std::array<double, 8> kGL16w = {
    0.18945061045506850, 0.18260341504492359, 0.16915651939500254,
    0.14959598881657673, 0.12462897125553387, 0.09515851168249278,
    0.06225352393864789, 0.02715245941175409};

template <typename F>
double gauss16(F&& f, double a, double b) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (size_t i = 0; i < kGL16x.size(); ++i)
        s += kGL16w[i] * (f(mid + half * kGL16x[i]) + f(mid - half * kGL16x[i]));
    return s * half;
}

}  // namespace

// -----------------------------------------------------------------------------
// Hurwitz jets at s = 1
// -----------------------------------------------------------------------------

Jet3 hurwitz_regular_jet(double x, int K) {
    if (x <= 0.0) throw std::invalid_argument("hurwitz_regular_jet: x <= 0");
    Jet3 z;
    // sum_{k<K} (k+x)^{-1-h} = sum (1/(k+x)) e^{-h ln(k+x)}
    for (int k = 0; k < K; ++k) {
        double v = k + x;
        double inv = 1.0 / v, L = std::log(v);
        z.c0 += inv;
        z.c1 += -inv * L;
        z.c2 += inv * 0.5 * L * L;
    }
    double W = K + x;
    double L = std::log(W), invW = 1.0 / W;
    // (K+x)^{1-s}/(s-1) = e^{-hL}/h; the 1/h pole is dropped here (it cancels
    // against sum_a chi(a) = 0 in every use), leaving -L + L^2 h/2 - L^3 h^2/6.
    z.c0 += -L;
    z.c1 += 0.5 * L * L;
    z.c2 += -L * L * L / 6.0;
    // + (1/2)(K+x)^{-s}
    z.c0 += 0.5 * invW;
    z.c1 += -0.5 * invW * L;
    z.c2 += 0.25 * invW * L * L;
    // Euler-Maclaurin corrections: B_{2r}/(2r)! (s)_{2r-1} (K+x)^{-s-2r+1}
    Jet3 poch{1.0, 0.0, 0.0};  // rising factorial (s)_{2r-1} at s = 1+h
    Jet3 expj{1.0, -L, 0.5 * L * L};
    double Wpow = 1.0;
    int j = 0;
    for (size_t r = 1; r <= kBernoulli.size(); ++r) {
        while (j < static_cast<int>(2 * r - 1)) {
            poch = poch * Jet3{cplx(1.0 + j), cplx(1.0), cplx(0.0)};
            ++j;
        }
        Wpow *= invW * invW;  // (K+x)^{-s-2r+1} = W^{-2r} e^{-hL}
        double scale = kBernoulli[r - 1] / factorial(static_cast<int>(2 * r));
        z += (scale * Wpow) * (poch * expj);
    }
    return z;
}

// -----------------------------------------------------------------------------
// L-values at s = 1
// -----------------------------------------------------------------------------

namespace {

std::mutex jets_mutex;
// Per modulus: hurwitz_regular_jet(a/q) for a = 0..q-1 (coprime entries only).
std::map<int64_t, std::vector<std::array<double, 3>>> jets_cache;

const std::vector<std::array<double, 3>>& modulus_jets(int64_t q) {
    std::lock_guard lock(jets_mutex);
    auto it = jets_cache.find(q);
    if (it != jets_cache.end()) return it->second;
    std::vector<std::array<double, 3>> v(static_cast<size_t>(q));
    for (int64_t a = 1; a < q; ++a) {
        if (gcd64(a, q) != 1) continue;
        Jet3 j = hurwitz_regular_jet(static_cast<double>(a) / q);
        v[a] = {j.c0.real(), j.c1.real(), j.c2.real()};
    }
    return jets_cache.emplace(q, std::move(v)).first->second;
}

std::mutex bundle_mutex;
std::map<std::pair<int64_t, int64_t>, LValueBundle> bundle_cache;

}  // namespace

const LValueBundle& L_derivatives_at_1(const DirichletCharacter& chi_star) {
    if (chi_star.is_principal())
        throw std::invalid_argument("L_derivatives_at_1: principal character");
    if (chi_star.conductor() != chi_star.modulus())
        throw std::invalid_argument("L_derivatives_at_1: character not primitive");
    int64_t q = chi_star.modulus(), label = chi_star.label();
    {
        std::lock_guard lock(bundle_mutex);
        auto it = bundle_cache.find({q, label});
        if (it != bundle_cache.end()) return it->second;
    }
    const auto& jets = modulus_jets(q);
    Jet3 S;
    for (int64_t a = 1; a < q; ++a) {
        if (gcd64(a, q) != 1) continue;
        cplx c = chi_star(a);
        S += Jet3{c * jets[a][0], c * jets[a][1], c * jets[a][2]};
    }
    // L(s) = q^{-s} sum_a chi(a) zeta(s, a/q); q^{-1-h} = (1/q) e^{-h ln q}.
    double lq = std::log(static_cast<double>(q));
    Jet3 qjet{1.0 / q, -lq / q, 0.5 * lq * lq / q};
    Jet3 L = qjet * S;
    LValueBundle b;
    b.conductor = q;
    b.label = label;
    b.L = L.c0;
    b.L1 = L.c1;
    b.L2 = 2.0 * L.c2;
    b.err = 5e-13 * static_cast<double>(q);
    std::lock_guard lock(bundle_mutex);
    return bundle_cache.emplace(std::make_pair(q, label), b).first->second;
}

cplx logderiv_primitive(const DirichletCharacter& chi) {
    auto star = CharacterGroup::primitive_lift(chi);
    const auto& b = L_derivatives_at_1(star);
    return b.L1 / b.L;
}

LogDerivs log_derivatives(const DirichletCharacter& chi) {
    if (chi.is_principal())
        throw std::invalid_argument("log_derivatives: principal character");
    auto star = CharacterGroup::primitive_lift(chi);
    const auto& bundle = L_derivatives_at_1(star);
    Jet3 L{bundle.L, bundle.L1, 0.5 * bundle.L2};
    // L_q(s) = L_*(s) prod_{p | q, p coprime to q*} (1 - chi*(p) p^{-s})
    auto ctx = ModulusContext::make(chi.modulus());
    for (const auto& f : ctx.factors) {
        if (star.modulus() % f.p == 0) continue;
        cplx w = star(f.p) / static_cast<double>(f.p);
        double lp = std::log(static_cast<double>(f.p));
        L = L * Jet3{1.0 - w, w * lp, -0.5 * w * lp * lp};
    }
    LogDerivs d;
    d.l1 = L.c1 / L.c0;
    d.l2 = 2.0 * L.c2 / L.c0;
    return d;
}

// -----------------------------------------------------------------------------
// Smoothed sums
// -----------------------------------------------------------------------------

SmoothedLogDeriv logderiv_smoothed(const DirichletCharacter& chi, double y) {
    if (chi.is_principal())
        throw std::invalid_argument("logderiv_smoothed: principal character");
    if (!(y > 0.0)) throw std::invalid_argument("logderiv_smoothed: y <= 0");
    // e^{-n/y} log n / n < 1e-16 once n > 43 y (for all y >= 10).
    int64_t cutoff = static_cast<int64_t>(43.0 * y) + 100;
    auto primes = primes_up_to(cutoff);
    cplx sum = 0.0;
    for (int64_t p : primes) {
        double lp = std::log(static_cast<double>(p));
        for (int64_t pe = p; pe <= cutoff;) {
            cplx c = chi(pe);
            if (c != cplx{0.0, 0.0})
                sum += c * (lp * std::exp(-pe / y) / static_cast<double>(pe));
            if (pe > cutoff / p) break;
            pe *= p;
        }
    }
    double lq = std::log(static_cast<double>(chi.modulus()));
    SmoothedLogDeriv out;
    out.value = -sum;
    out.error_bound = (14.27 * lq + 16.25) / std::sqrt(y) +
                      (16.1 * lq + 17.83) / std::pow(y, 0.75);
    return out;
}

double smoothed_class_sum(int64_t q, int64_t a, double y) {
    if (q < 2) throw std::invalid_argument("smoothed_class_sum: q < 2");
    int64_t cutoff = static_cast<int64_t>(43.0 * y) + 100;
    auto primes = primes_up_to(cutoff);
    int64_t target = ((a % q) + q) % q;
    double sum = 0.0;
    for (int64_t p : primes) {
        double lp = std::log(static_cast<double>(p));
        for (int64_t pe = p; pe <= cutoff;) {
            if (pe % q == target)
                sum += lp * std::exp(-pe / y) / static_cast<double>(pe);
            if (pe > cutoff / p) break;
            pe *= p;
        }
    }
    return sum;
}

// -----------------------------------------------------------------------------
// b(chi), zero counts, tails
// -----------------------------------------------------------------------------

double b_chi_closed(const DirichletCharacter& chi) {
    if (chi.is_principal())
        throw std::invalid_argument("b_chi_closed: principal character");
    double qs = static_cast<double>(chi.conductor());
    double parity_term = (1.0 + chi.parity()) * std::log(2.0);
    return std::log(qs / kPi) - euler_gamma - parity_term +
           2.0 * logderiv_primitive(chi).real();
}

NTBounds N_T_bounds(int64_t qstar, double T) {
    if (T < 1.0) throw std::invalid_argument("N_T_bounds: T < 1");
    double x = std::log(qstar * T / (2.0 * kPi * std::exp(1.0)));
    NTBounds b;
    b.upper = (T / kPi) * x + 0.68884 * x + 10.6035;
    b.lower = (T >= 100.0) ? (44.0 * T / (45.0 * kPi)) * x - 10.551 : 0.0;
    if (b.lower < 0.0) b.lower = 0.0;
    return b;
}

double zero_tail_bound(int64_t qstar, double T, int n) {
    if (T < 100.0) throw std::invalid_argument("zero_tail_bound: T < 100");
    if (n < 1) throw std::invalid_argument("zero_tail_bound: n < 1");
    // sum_{|gamma|>T} f(gamma) = int_T^inf (-f')(t) (N(t) - N(T)) dt
    //                         <= int_T^inf |f'(t)| (upper(t) - lower(T)) dt,
    // with f(t) = (1/4 + t^2)^{-n} and the McCurley counting window.
    double NT_low = N_T_bounds(qstar, T).lower;
    auto integrand = [&](double t) {
        double f1 = 2.0 * n * t * std::pow(0.25 + t * t, -(n + 1.0));
        double excess = std::max(0.0, N_T_bounds(qstar, t).upper - NT_low);
        return f1 * excess;
    };
    double total = 0.0, lo = T;
    while (lo < 1e8) {
        double hi = std::min(lo * 2.0, 1e8);
        total += gauss16(integrand, lo, hi);
        lo = hi;
    }
    // Beyond 1e8 the integrand is below |f'| * upper(t); crude closed bound.
    double Tmax = 1e8;
    double c = (1.0 / kPi) * std::log(qstar * Tmax) + 1.0;
    total += 2.0 * n * c * (std::log(Tmax) + 1.0) *
             std::pow(Tmax, -(2.0 * n - 1.0));
    return total;
}

double ZeroList::partial_b_sum(int n) const {
    double s = 0.0;
    for (double g : ordinates) s += std::pow(0.25 + g * g, -n);
    return 2.0 * s;
}

BnResult b_n_from_zeros(const ZeroList& zl, int n) {
    if (zl.height < 100.0)
        throw std::invalid_argument("b_n_from_zeros: covered height < 100");
    BnResult r;
    r.value = zl.partial_b_sum(n);
    r.tail_bound = zero_tail_bound(zl.conductor, zl.height, n);
    return r;
}

}  // namespace race
