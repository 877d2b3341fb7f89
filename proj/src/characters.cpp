#include "race/characters.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace race {

namespace {

// smallest primitive root mod p (p odd prime)
int64_t primitive_root_mod_p(int64_t p) {
    if (p == 2) return 1;
    auto fac = factorize(p - 1);
    for (int64_t g = 2;; ++g) {
        bool ok = true;
        for (const auto& [fp, fe] : fac) {
            if (pow_mod(g, (p - 1) / fp, p) == 1) { ok = false; break; }
        }
        if (ok) return g;
    }
}

int64_t ipow(int64_t b, int e) {
    int64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

}  // namespace

// -----------------------------------------------------------------------------
// Group construction
// -----------------------------------------------------------------------------

std::shared_ptr<const CharacterGroup> CharacterGroup::get(int64_t q) {
    static std::mutex mu;
    static std::map<int64_t, std::shared_ptr<const CharacterGroup>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(q);
        if (it != cache.end()) return it->second;
    }
    auto g = std::shared_ptr<CharacterGroup>(new CharacterGroup());
    g->build(q);
    for (auto& ch : g->chars_) ch.group_ = g;  // back-links need the owner
    std::lock_guard<std::mutex> lock(mu);
    auto [it, inserted] = cache.emplace(q, g);
    return it->second;
}

void CharacterGroup::build(int64_t q) {
    ctx_ = ModulusContext::make(q);

    // --- cyclic components of (Z/q)* ---
    for (const auto& [p, e] : ctx_.factors) {
        int64_t pe = ipow(p, e);
        if (p == 2) {
            if (e == 1) continue;  // trivial factor
            if (e == 2) {
                Component c;
                c.prime_power = 4;
                c.order = 2;
                c.two_sign = true;
                c.dlog.assign(4, -1);
                c.dlog[1] = 0;
                c.dlog[3] = 1;
                comps_.push_back(std::move(c));
                continue;
            }
            // e >= 3: the sign factor and the <5> factor
            Component sign;
            sign.prime_power = pe;
            sign.order = 2;
            sign.two_sign = true;
            sign.dlog.assign(static_cast<size_t>(pe), -1);
            Component five;
            five.prime_power = pe;
            five.order = pe / 4;  // 2^{e-2}
            five.dlog.assign(static_cast<size_t>(pe), -1);
            int64_t x = 1;
            for (int64_t k = 0; k < five.order; ++k) {
                sign.dlog[static_cast<size_t>(x)] = 0;
                five.dlog[static_cast<size_t>(x)] = static_cast<int32_t>(k);
                sign.dlog[static_cast<size_t>(pe - x)] = 1;
                five.dlog[static_cast<size_t>(pe - x)] = static_cast<int32_t>(k);
                x = mul_mod(x, 5, pe);
            }
            comps_.push_back(std::move(sign));
            comps_.push_back(std::move(five));
            continue;
        }
        // odd prime power: primitive root
        int64_t g = primitive_root_mod_p(p);
        if (e > 1 && pow_mod(g, p - 1, p * p) == 1) g += p;
        Component c;
        c.prime_power = pe;
        c.order = pe - pe / p;  // phi(p^e)
        c.dlog.assign(static_cast<size_t>(pe), -1);
        int64_t x = 1;
        for (int64_t k = 0; k < c.order; ++k) {
            c.dlog[static_cast<size_t>(x)] = static_cast<int32_t>(k);
            x = mul_mod(x, g, pe);
        }
        comps_.push_back(std::move(c));
    }

    exponent_ = 1;
    for (const auto& c : comps_)
        exponent_ = std::lcm(exponent_, c.order);

    // --- enumerate characters by ascending label ---
    chars_.reserve(static_cast<size_t>(ctx_.phi));
    label_index_.assign(static_cast<size_t>(std::max<int64_t>(ctx_.q, 2)), -1);
    if (ctx_.q == 1) {
        DirichletCharacter ch;
        ch.q_ = 1;
        ch.label_ = 1;
        label_index_[1] = 0;
        chars_.push_back(ch);
    } else {
        for (int64_t n = 1; n < ctx_.q; ++n) {
            if (gcd64(n, ctx_.q) != 1) continue;
            DirichletCharacter ch;
            ch.q_ = ctx_.q;
            ch.label_ = n;
            label_index_[static_cast<size_t>(n)] =
                static_cast<int32_t>(chars_.size());
            chars_.push_back(ch);
        }
    }

    // fill metadata (needs pairing, so after component setup)
    for (auto& ch : chars_) {
        int64_t km1 = ctx_.q == 1 ? 0 : pairing_exponent(ch.label_, ctx_.q - 1);
        ch.parity_ = (km1 == 0) ? 1 : -1;
        ch.real_ = (ctx_.q == 1) ||
                   mul_mod(ch.label_, ch.label_, ctx_.q) == 1 % ctx_.q;
        ch.conductor_ = conductor_of(ch.label_);
    }
}

int64_t CharacterGroup::pairing_exponent(int64_t n, int64_t m) const {
    int64_t k = 0;
    for (const auto& c : comps_) {
        int64_t pe = c.prime_power;
        int32_t an = c.dlog[static_cast<size_t>(n % pe)];
        int32_t am = c.dlog[static_cast<size_t>(m % pe)];
        // n, m assumed coprime to q; dlog entries present
        int64_t s = (static_cast<int64_t>(an) * am) % c.order;
        k += (exponent_ / c.order) * s;
    }
    return k % exponent_;
}

int64_t CharacterGroup::conductor_of(int64_t label) const {
    if (ctx_.q == 1 || label == 1) return 1;
    // divisors of q, ascending
    std::vector<int64_t> divs;
    for (int64_t d = 1; d * d <= ctx_.q; ++d) {
        if (ctx_.q % d == 0) {
            divs.push_back(d);
            if (d != ctx_.q / d) divs.push_back(ctx_.q / d);
        }
    }
    std::sort(divs.begin(), divs.end());
    for (int64_t d : divs) {
        bool trivial_on_kernel = true;
        for (int64_t m = 1 + d; m < ctx_.q; m += d) {
            if (gcd64(m, ctx_.q) != 1) continue;
            if (pairing_exponent(label, m) != 0) {
                trivial_on_kernel = false;
                break;
            }
        }
        if (trivial_on_kernel) return d;
    }
    return ctx_.q;
}

DirichletCharacter CharacterGroup::character(int64_t label) const {
    int64_t l = ctx_.q == 1 ? 1 : label % ctx_.q;
    if (l < 0) l += ctx_.q;
    if (l >= 0 && l < static_cast<int64_t>(label_index_.size()) &&
        label_index_[static_cast<size_t>(l)] >= 0)
        return chars_[static_cast<size_t>(label_index_[static_cast<size_t>(l)])];
    throw std::invalid_argument("character: label not coprime to modulus");
}

DirichletCharacter CharacterGroup::primitive_lift(
    const DirichletCharacter& chi) {
    int64_t qs = chi.conductor();
    auto sub = CharacterGroup::get(qs);
    // Conrey labels are induction-compatible: try label mod q*, verify.
    int64_t cand = qs == 1 ? 1 : chi.label() % qs;
    auto agrees = [&](const DirichletCharacter& star) {
        int64_t q = chi.modulus();
        int64_t N1 = chi.exponent_denominator();
        int64_t N2 = star.exponent_denominator();
        for (int64_t m = 1; m < q; ++m) {
            if (gcd64(m, q) != 1) continue;
            int64_t k1 = chi.exponent_at(m);
            int64_t k2 = star.exponent_at(m);
            if (static_cast<__int128>(k1) * N2 !=
                static_cast<__int128>(k2) * N1)
                return false;
        }
        return true;
    };
    if (qs == 1 || gcd64(cand, qs) == 1) {
        auto star = sub->character(qs == 1 ? 1 : cand);
        if (agrees(star)) return star;
    }
    for (const auto& c : sub->characters()) {  // fallback: exhaustive match
        auto star = sub->character(c.label());
        if (agrees(star)) return star;
    }
    throw std::logic_error("primitive_lift: no inducing character found");
}

// -----------------------------------------------------------------------------
// DirichletCharacter evaluation
// -----------------------------------------------------------------------------

int64_t DirichletCharacter::exponent_at(int64_t n) const {
    if (q_ == 1) return 0;
    int64_t m = n % q_;
    if (m < 0) m += q_;
    if (gcd64(m, q_) != 1) return -1;
    return group_->pairing_exponent(label_, m);
}

int64_t DirichletCharacter::exponent_denominator() const {
    return q_ == 1 ? 1 : group_->exponent();
}

std::complex<double> DirichletCharacter::operator()(int64_t n) const {
    int64_t k = exponent_at(n);
    if (k < 0) return {0.0, 0.0};
    if (k == 0) return {1.0, 0.0};
    int64_t N = exponent_denominator();
    if (2 * k == N) return {-1.0, 0.0};
    if (4 * k == N) return {0.0, 1.0};
    if (4 * k == 3 * N) return {0.0, -1.0};
    double theta = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(N);
    return {std::cos(theta), std::sin(theta)};
}

int64_t DirichletCharacter::conjugate_label() const {
    if (q_ == 1) return 1;
    return inv_mod(label_, q_);
}

// -----------------------------------------------------------------------------
// Weighted sums
// -----------------------------------------------------------------------------

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i)
        r = r * static_cast<double>(n - i) / static_cast<double>(i + 1);
    return std::round(r);
}

}  // namespace

double weighted_char_sum(const CharacterGroup& g, const ResiduePair& pair,
                         int n, int64_t c) {
    int64_t q = g.modulus();
    if (gcd64(c, q) != 1)
        throw std::invalid_argument("weighted_char_sum: c not reduced");
    int64_t binv = inv_mod(pair.b, q);
    double total = 0.0;
    for (int i = -n; i <= n; ++i) {
        int64_t t = c % q;
        int64_t base = i >= 0 ? mul_mod(pair.a, binv, q)
                              : mul_mod(pair.b, inv_mod(pair.a, q), q);
        t = mul_mod(t, pow_mod(base, std::abs(i), q), q);
        double sign = (i % 2 == 0) ? 1.0 : -1.0;
        total += sign * binom(2 * n, n + i) *
                 static_cast<double>(g.context().phi) *
                 static_cast<double>(iota(q, t));
    }
    return total;
}

std::complex<double> weighted_char_sum_direct(const CharacterGroup& g,
                                              const ResiduePair& pair, int n,
                                              int64_t c) {
    std::complex<double> total = 0.0;
    for (const auto& chi : g.characters()) {
        std::complex<double> d = chi(pair.a) - chi(pair.b);
        double w = std::pow(std::norm(d), n);
        total += w * chi(c);
    }
    return total;
}

LogQstarSum log_qstar_weighted_sum(const CharacterGroup& g,
                                   const ResiduePair& pair) {
    LogQstarSum out;
    for (const auto& chi : g.characters()) {
        std::complex<double> d = chi(pair.a) - chi(pair.b);
        out.direct +=
            std::norm(d) * std::log(static_cast<double>(chi.conductor()));
    }
    const auto& ctx = g.context();
    double s = 0.0;
    for (const auto& [p, e] : ctx.factors)
        s += std::log(static_cast<double>(p)) / static_cast<double>(p - 1);
    int64_t gq = gcd64(ctx.q, pair.a - pair.b);
    int64_t q1 = ctx.q / gq;
    double lam_term =
        q1 > 1 ? von_mangoldt(q1) /
                     static_cast<double>(phi_from_factors(factorize(q1)))
               : 0.0;
    out.closed_form = 2.0 * static_cast<double>(ctx.phi) *
                      (std::log(static_cast<double>(ctx.q)) - s + lam_term);
    return out;
}

}  // namespace race
