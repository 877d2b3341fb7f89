#include "race/arith.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

namespace race {

// -----------------------------------------------------------------------------
// Modular helpers
// -----------------------------------------------------------------------------

int64_t gcd64(int64_t a, int64_t b) {
    return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b);
}

int64_t mul_mod(int64_t a, int64_t b, int64_t m) {
    return static_cast<int64_t>(
        static_cast<__int128>(a) * static_cast<__int128>(b) % m);
}

int64_t pow_mod(int64_t a, int64_t e, int64_t m) {
    if (m == 1) return 0;
    int64_t r = 1;
    a %= m;
    if (a < 0) a += m;
    while (e > 0) {
        if (e & 1) r = mul_mod(r, a, m);
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    return r;
}

int64_t inv_mod(int64_t a, int64_t m) {
    // extended Euclid
    int64_t g = m, x = 0, x1 = 1, a1 = a % m;
    if (a1 < 0) a1 += m;
    int64_t g1 = a1;
    while (g1 != 0) {
        int64_t qq = g / g1;
        std::swap(g -= qq * g1, g1);
        std::swap(x -= qq * x1, x1);
    }
    if (g != 1) throw std::invalid_argument("inv_mod: arguments not coprime");
    x %= m;
    if (x < 0) x += m;
    return x;
}

// -----------------------------------------------------------------------------
// Factorization
// -----------------------------------------------------------------------------

namespace {

bool miller_rabin(int64_t n) {
    if (n < 2) return false;
    for (int64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    int64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (int64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        int64_t x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int r = 1; r < s; ++r) {
            x = mul_mod(x, x, n);
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

int64_t pollard_rho(int64_t n) {
    if ((n & 1) == 0) return 2;
    for (int64_t c = 1;; ++c) {
        auto f = [&](int64_t x) { return (mul_mod(x, x, n) + c) % n; };
        int64_t x = 2, y = 2, d = 1;
        while (d == 1) {
            x = f(x);
            y = f(f(y));
            d = gcd64(x > y ? x - y : y - x, n);
        }
        if (d != n) return d;
    }
}

void factor_rec(int64_t n, std::vector<int64_t>& primes) {
    if (n == 1) return;
    if (miller_rabin(n)) { primes.push_back(n); return; }
    int64_t d = pollard_rho(n);
    factor_rec(d, primes);
    factor_rec(n / d, primes);
}

}  // namespace

std::vector<Factor> factorize(int64_t q) {
    if (q < 1) throw std::invalid_argument("factorize: q must be positive");
    std::vector<int64_t> primes;
    // trial division first; rho only for large leftovers
    for (int64_t p = 2; p * p <= q && p < 100000; p += (p == 2 ? 1 : 2)) {
        while (q % p == 0) { primes.push_back(p); q /= p; }
    }
    if (q > 1) factor_rec(q, primes);
    std::sort(primes.begin(), primes.end());
    std::vector<Factor> out;
    for (size_t i = 0; i < primes.size();) {
        size_t j = i;
        while (j < primes.size() && primes[j] == primes[i]) ++j;
        out.push_back({primes[i], static_cast<int>(j - i)});
        i = j;
    }
    return out;
}

int64_t phi_from_factors(const std::vector<Factor>& f) {
    int64_t phi = 1;
    for (const auto& [p, e] : f) {
        int64_t pe = 1;
        for (int i = 1; i < e; ++i) pe *= p;
        phi *= pe * (p - 1);
    }
    return phi;
}

int64_t rho_of(int64_t q) {
    if (q < 1) throw std::invalid_argument("rho_of: q must be positive");
    if (q <= 2) return 1;
    auto f = factorize(q);
    int omega_odd = 0;
    int e2 = 0;
    for (const auto& [p, e] : f) {
        if (p == 2) e2 = e; else ++omega_odd;
    }
    int64_t r = int64_t{1} << omega_odd;  // one factor of 2 per odd prime
    if (e2 == 1) return r;          // 2 || q: no extra factor
    if (e2 == 2) return 2 * r;      // 4 | q, 8 does not divide
    if (e2 >= 3) return 4 * r;      // 8 | q
    return r;                       // odd q
}

std::vector<int64_t> primes_up_to(int64_t n) {
    static std::mutex mu;
    static std::vector<int64_t> primes;
    static int64_t limit = 0;
    std::lock_guard lock(mu);
    if (n > limit) {
        std::vector<bool> comp(static_cast<size_t>(n) + 1, false);
        primes.clear();
        for (int64_t p = 2; p <= n; ++p) {
            if (comp[static_cast<size_t>(p)]) continue;
            primes.push_back(p);
            for (int64_t m = p * p; m <= n; m += p)
                comp[static_cast<size_t>(m)] = true;
        }
        limit = n;
    }
    return primes;  // copy: callers iterate without holding the lock
}

double von_mangoldt(int64_t n) {
    if (n < 2) return 0.0;
    auto f = factorize(n);
    if (f.size() != 1) return 0.0;
    return std::log(static_cast<double>(f[0].p));
}

int iota(int64_t q, int64_t n) {
    int64_t r = (n - 1) % q;
    return r == 0 ? 1 : 0;
}

double K_q(int64_t q, int64_t n) {
    int64_t g = n == 0 ? q : gcd64(n, q);
    g = gcd64(g, q);
    int64_t q1 = q / g;
    double lead = q1 > 1 ? von_mangoldt(q1) / static_cast<double>(
                               phi_from_factors(factorize(q1)))
                         : 0.0;
    double tail = von_mangoldt(q) / static_cast<double>(
                      phi_from_factors(factorize(q)));
    return lead - tail;
}

// -----------------------------------------------------------------------------
// ModulusContext
// -----------------------------------------------------------------------------

ModulusContext ModulusContext::make(int64_t q) {
    if (q < 1) throw std::invalid_argument("ModulusContext: q must be positive");
    ModulusContext ctx;
    ctx.q = q;
    ctx.factors = factorize(q);
    ctx.phi = phi_from_factors(ctx.factors);
    ctx.rho = rho_of(q);
    ctx.omega = static_cast<int>(ctx.factors.size());
    ctx.half_equivalent = (q % 4 == 2);
    // squares of reduced residues
    ctx.square_table_.assign(static_cast<size_t>(q), 0);
    for (int64_t x = 0; x < q; ++x) {
        if (gcd64(x, q) == 1) ctx.square_table_[mul_mod(x, x, q)] = 1;
    }
    return ctx;
}

bool ModulusContext::is_reduced(int64_t n) const {
    return gcd64(reduce(n), q) == 1;
}

int64_t ModulusContext::reduce(int64_t n) const {
    int64_t r = n % q;
    return r < 0 ? r + q : r;
}

int64_t ModulusContext::least_positive(int64_t n) const {
    int64_t r = reduce(n);
    return r == 0 ? q : r;
}

bool ModulusContext::is_square(int64_t a) const {
    int64_t r = reduce(a);
    if (gcd64(r, q) != 1)
        throw std::invalid_argument("is_square: residue not reduced");
    return square_table_[static_cast<size_t>(r)] != 0;
}

int64_t ModulusContext::c_qa(int64_t a) const {
    return is_square(a) ? rho - 1 : -1;
}

void ModulusContext::require_race_capable() const {
    if (q <= 2)
        throw std::invalid_argument(
            "modulus " + std::to_string(q) + " has no nonsquare classes");
}

double script_L(const ModulusContext& ctx) {
    double s = 0.0;
    for (const auto& [p, e] : ctx.factors)
        s += std::log(static_cast<double>(p)) / static_cast<double>(p - 1);
    double lam_over_phi =
        von_mangoldt(ctx.q) / static_cast<double>(ctx.phi);
    return std::log(static_cast<double>(ctx.q)) - s + lam_over_phi -
           (euler_gamma + std::log(2.0 * M_PI));
}

// -----------------------------------------------------------------------------
// ResiduePair
// -----------------------------------------------------------------------------

ResiduePair ResiduePair::make(const ModulusContext& ctx, int64_t a, int64_t b) {
    ResiduePair pr;
    pr.a = ctx.reduce(a);
    pr.b = ctx.reduce(b);
    if (gcd64(pr.a, ctx.q) != 1 || gcd64(pr.b, ctx.q) != 1)
        throw std::invalid_argument("ResiduePair: residues must be reduced");
    int64_t binv = inv_mod(pr.b, ctx.q);
    int64_t ainv = inv_mod(pr.a, ctx.q);
    pr.r1 = ctx.least_positive(mul_mod(pr.a, binv, ctx.q));
    pr.r2 = ctx.least_positive(mul_mod(pr.b, ainv, ctx.q));
    return pr;
}

// -----------------------------------------------------------------------------
// e/h/H family
// -----------------------------------------------------------------------------

int64_t e_qpr(const ModulusContext& ctx, int64_t p, int64_t r) {
    int64_t m = ctx.q;
    int nu = 0;
    for (const auto& [fp, fe] : ctx.factors) {
        if (fp == p) { nu = fe; break; }
    }
    if (nu == 0) throw std::invalid_argument("e_qpr: p does not divide q");
    for (int i = 0; i < nu; ++i) m /= p;
    if (m == 1) return 1;  // empty congruence: minimal e is 1
    if (gcd64(r, ctx.q) != 1)
        throw std::invalid_argument("e_qpr: r not reduced");
    int64_t target = inv_mod(r % m, m);
    // p^e cycles mod m with period ord_m(p) <= phi(m); walk until repeat
    int64_t x = p % m;
    int64_t start = x;
    int64_t e = 1;
    while (true) {
        if (x == target) return e;
        x = mul_mod(x, p, m);
        ++e;
        if (x == start) return e_infinite;  // full cycle, never hit
    }
}

double h_qpr(const ModulusContext& ctx, int64_t p, int64_t r) {
    int64_t e = e_qpr(ctx, p, r);
    if (e == e_infinite) return 0.0;
    int nu = 0;
    for (const auto& [fp, fe] : ctx.factors)
        if (fp == p) nu = fe;
    int64_t pnu = 1;
    for (int i = 0; i < nu; ++i) pnu *= p;
    double phipnu = static_cast<double>(pnu - pnu / p);
    return std::log(static_cast<double>(p)) /
           (phipnu * std::pow(static_cast<double>(p), static_cast<double>(e)));
}

double h0_qpr(const ModulusContext& ctx, int64_t p, int64_t r) {
    double h = h_qpr(ctx, p, r);
    if (h == 0.0) return 0.0;
    int64_t e1 = e_qpr(ctx, p, 1);
    // e1 finite whenever any e(q;p,r) is finite (the subgroup contains 1)
    double factor =
        1.0 / (1.0 - std::pow(static_cast<double>(p), -static_cast<double>(e1)));
    return h * factor;
}

HValues H_and_H0(const ModulusContext& ctx, const ResiduePair& pair) {
    HValues out;
    for (const auto& [p, e] : ctx.factors) {
        out.H += h_qpr(ctx, p, pair.r1) + h_qpr(ctx, p, pair.r2);
        out.H0 += h0_qpr(ctx, p, pair.r1) + h0_qpr(ctx, p, pair.r2) -
                  2.0 * h0_qpr(ctx, p, 1);
    }
    return out;
}

}  // namespace race
