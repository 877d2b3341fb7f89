#pragma once

/**
 * @file arith.hpp
 * @brief Exact integer and multiplicative arithmetic for prime-race work.
 *
 * Factorization, Euler phi, the von Mangoldt function, the square-root-of-1
 * count rho(q), the indicator iota_q, the K_q and script-L quantities, square
 * testing mod q, least-residue pairs, and the h/H/h0/H0 family built from the
 * minimal exponents e(q;p,r).
 *
 * Everything here is a pure function of its inputs; ModulusContext is
 * immutable after construction and safe to share across threads.
 */

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace race {

// Natural-log units throughout.  Euler's constant to 30+ digits; it enters
// certified bounds, so it is pinned here rather than computed.
inline constexpr double euler_gamma = 0.57721566490153286060651209008240;

struct Factor {
    int64_t p;
    int e;
};

// -----------------------------------------------------------------------------
// Basic modular helpers
// -----------------------------------------------------------------------------

int64_t mul_mod(int64_t a, int64_t b, int64_t m);
int64_t pow_mod(int64_t a, int64_t e, int64_t m);
int64_t inv_mod(int64_t a, int64_t m);  // throws if gcd(a,m) != 1
int64_t gcd64(int64_t a, int64_t b);

// -----------------------------------------------------------------------------
// Factorization and multiplicative functions
// -----------------------------------------------------------------------------

// Canonical ascending factorization; trial division with a Pollard-rho
// fallback, adequate for q <= 1e7 and beyond.
std::vector<Factor> factorize(int64_t q);

int64_t phi_from_factors(const std::vector<Factor>& f);

// rho(q): number of solutions of x^2 == 1 (mod q).  Four-case formula.
int64_t rho_of(int64_t q);

// von Mangoldt: log p when n is a prime power p^k, else 0.
double von_mangoldt(int64_t n);

// Shared ascending prime table covering [2, n]; grown on demand and cached
// (thread-safe).  Returns a copy so callers can iterate without locking.
std::vector<int64_t> primes_up_to(int64_t n);

// iota_q(n): 1 iff n == 1 (mod q).  Accepts any integer n.
int iota(int64_t q, int64_t n);

// K_q(n) = Lambda(q/(q,n))/phi(q/(q,n)) - Lambda(q)/phi(q); in [0, log 2].
double K_q(int64_t q, int64_t n);

// -----------------------------------------------------------------------------
// ModulusContext
// -----------------------------------------------------------------------------

/**
 * Shared read-only context for a modulus: factorization, phi, rho, omega and
 * the table of squares among reduced residues.
 *
 * Moduli q == 2 (mod 4) are accepted but flagged (the race mod q coincides
 * with the race mod q/2); q in {1,2} is rejected by require_race_capable().
 */
struct ModulusContext {
    int64_t q = 0;
    std::vector<Factor> factors;
    int64_t phi = 0;
    int64_t rho = 0;
    int omega = 0;
    bool half_equivalent = false;  // q == 2 (mod 4)

    static ModulusContext make(int64_t q);

    bool is_reduced(int64_t n) const;
    int64_t reduce(int64_t n) const;        // least nonnegative residue
    int64_t least_positive(int64_t n) const;  // in [1, q]

    // True iff a (reduced) is congruent to a square.  Table-backed.
    bool is_square(int64_t a) const;

    // c(q;a) = -1 + #{x mod q : x^2 == a}; either rho-1 or -1.
    int64_t c_qa(int64_t a) const;

    void require_race_capable() const;  // throws for q in {1,2}

  private:
    std::vector<uint8_t> square_table_;  // indexed by residue, 1 if square
};

// script-L(q) = log q - sum_{p|q} log p/(p-1) + Lambda(q)/phi(q)
//               - (gamma0 + log 2*pi).  Positive for q >= 43.
double script_L(const ModulusContext& ctx);

// -----------------------------------------------------------------------------
// Residue pairs
// -----------------------------------------------------------------------------

struct ResiduePair {
    int64_t a = 0;
    int64_t b = 0;
    int64_t r1 = 0;  // least positive residue of a*b^{-1}
    int64_t r2 = 0;  // least positive residue of b*a^{-1}

    static ResiduePair make(const ModulusContext& ctx, int64_t a, int64_t b);
};

// -----------------------------------------------------------------------------
// The e/h/H family
// -----------------------------------------------------------------------------

// Sentinel for "p never reaches r^{-1} mod q/p^nu".
inline constexpr int64_t e_infinite = std::numeric_limits<int64_t>::max();

// e(q;p,r) = min{ e >= 1 : p^e == r^{-1} (mod q/p^nu) }, or e_infinite.
// When q = p^nu the congruence is empty and the minimum is 1.
int64_t e_qpr(const ModulusContext& ctx, int64_t p, int64_t r);

// h(q;p,r) = (1/phi(p^nu)) * log p / p^{e(q;p,r)}; 0 when e is infinite.
double h_qpr(const ModulusContext& ctx, int64_t p, int64_t r);

// h0 adds the geometric factor (1 - p^{-e(q;p,1)})^{-1}.
double h0_qpr(const ModulusContext& ctx, int64_t p, int64_t r);

struct HValues {
    double H = 0.0;
    double H0 = 0.0;
};

// H  = sum_{p|q} ( h(q;p,ab^{-1}) + h(q;p,ba^{-1}) )
// H0 = sum_{p|q} ( h0(q;p,ab^{-1}) + h0(q;p,ba^{-1}) - 2 h0(q;p,1) )
HValues H_and_H0(const ModulusContext& ctx, const ResiduePair& pair);

}  // namespace race
