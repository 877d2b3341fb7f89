#pragma once

/**
 * @file variance.hpp
 * @brief The variance V(q;a,b) of the prime-race limiting distribution and
 * its arithmetic relatives.
 *
 * V is assembled three ways (L-values, truncated von Mangoldt sums, zero
 * sums) that must agree; the decomposition into named components follows the
 * exact evaluation 2 phi(q) (script-L + K_q(a-b) + iota log 2) + 2 M*.  Also
 * here: the fourth-cumulant quantity U = W2 V, the mirror-image variance V+,
 * the bias functional Delta with its term-by-term breakdown, the rating R(r,s)
 * governing limiting comparisons of delta(q; r+sq, 1), and the higher-order
 * arithmetic terms script-L_n, M_{n,j}, H_{n,j}.
 */

#include <cstdint>
#include <string>
#include <vector>

#include "race/characters.hpp"

namespace race {

// -----------------------------------------------------------------------------
// M* and V
// -----------------------------------------------------------------------------

struct MStarResult {
    double value = 0.0;
    double error_bound = 0.0;
    bool heuristic = false;  // true for the truncated-sum route, whose error
                             // constant is an unproved envelope
};

// M*(q;a,b) = sum_{chi != chi0} |chi(a)-chi(b)|^2 L'/L(1, chi*).
MStarResult M_star_lvalues(const CharacterGroup& g, const ResiduePair& pair);

// Truncated-congruence-sum route: phi(q) times the three Lambda(n)/n sums to
// y, plus phi(q) H0; error reported as phi(q) log^2(qy)/sqrt(y) (heuristic).
MStarResult M_star_arithmetic(const CharacterGroup& g, const ResiduePair& pair,
                              double y);

enum class VarianceMethod { lvalues, arithmetic, zeros };

struct VarianceReport {
    int64_t q = 0;
    ResiduePair pair;
    double V = 0.0;
    // named components (lvalues/arithmetic methods): V = their sum
    double comp_scriptL = 0.0;  // 2 phi(q) script-L(q)
    double comp_K = 0.0;        // 2 phi(q) K_q(a-b)
    double comp_iota = 0.0;     // 2 phi(q) iota_q(-a b^{-1}) log 2
    double comp_Mstar = 0.0;    // 2 M*(q;a,b)
    VarianceMethod method = VarianceMethod::lvalues;
    double error_bound = 0.0;
};

// y is used by the arithmetic method only; y <= 0 selects the default q^2.
VarianceReport variance_V(int64_t q, int64_t a, int64_t b,
                          VarianceMethod method = VarianceMethod::lvalues,
                          double y = 0.0);

// -----------------------------------------------------------------------------
// U = W2 V and the mirror-image variance
// -----------------------------------------------------------------------------

// Fourth-cumulant coefficient U(q;a,b) = W2(q;a,b) V(q;a,b) by the closed
// arithmetic-plus-L-values formula (uses L', L'' of the primitive inducing
// L-functions).
double U_second_cumulant(int64_t q, int64_t a, int64_t b);

// Same quantity through the independently derived combination
// (1/4) script-L_2 - parity character sums + M_{2,j}/H_{2,j} blocks;
// exposed as a cross-check oracle.
double U_via_higher_order_terms(int64_t q, int64_t a, int64_t b);

// zeta-zero sum over nontrivial zeros, sum 1/(1/4+gamma^2)
//   = 1 + gamma0/2 - log(4 pi)/2.
inline constexpr double b_chi0_zeta = 0.023095708966121033814310247906;

// V+(q;a,b) = sum_{chi != chi0} |chi(a)+chi(b)|^2 b(chi), via the closed
// formula with sign-flipped K_q and iota terms plus the principal-character
// removal constant 4 (gamma0 + log 4 pi).
double variance_plus(int64_t q, int64_t a, int64_t b);

// -----------------------------------------------------------------------------
// Delta and ratings
// -----------------------------------------------------------------------------

struct DeltaBreakdown {
    double K_term = 0.0;      // K_q(a-b)
    double iota_term = 0.0;   // iota_q(-a b^{-1}) log 2
    double lambda_r1 = 0.0;   // Lambda(r1)/r1
    double lambda_r2 = 0.0;   // Lambda(r2)/r2
    double H_term = 0.0;      // H(q;a,b)
    double total = 0.0;
};

DeltaBreakdown delta_discriminant(int64_t q, int64_t a, int64_t b);

// Exact rational with normalized sign and lowest terms.
struct Rational {
    int64_t num = 0;
    int64_t den = 1;

    static Rational make(int64_t num, int64_t den);
    bool is_integer() const { return den == 1; }
};

// The rating R(r,s): nonnegative, determined by the prime-power structure of
// the denominator of s and the shape of r.
double rating(const Rational& r, const Rational& s);

// Membership of q in Q(r,s): r + s q integral, coprime to q, nonsquare mod q.
bool in_Q_rs(const Rational& r, const Rational& s, int64_t q);

struct RatingResidual {
    int64_t q = 0;
    double residual = 0.0;  // Delta(q; r+sq, 1) - R(r,s)
};

std::vector<RatingResidual> rating_limit_residuals(
    const Rational& r, const Rational& s, const std::vector<int64_t>& q_list);

// -----------------------------------------------------------------------------
// Higher-order arithmetic terms (supported envelope: 1 <= j <= n <= 2)
// -----------------------------------------------------------------------------

// script-L_n(q; a, b): binomially weighted combination of log(q/pi) and
// Lambda/phi terms over the powers a^i b^{-i}.
double script_L_n(const CharacterGroup& g, const ResiduePair& pair, int n);

// M_{n,j}(q;a,b) = (1/phi) sum_{chi != chi0} |chi(a)-chi(b)|^{2n}
//                  d^j/ds^j log L(s, chi) at s=1; primitive=true uses chi*.
double M_nj(const CharacterGroup& g, const ResiduePair& pair, int n, int j,
            bool primitive);

// H_{n,j}(q;a,b) from the closed geometric-polynomial identity.
double H_nj(const ModulusContext& ctx, const ResiduePair& pair, int n, int j);

// sum_{e >= 1, e == r (mod s)} e^m / p^e in closed form (1 <= r <= s, m <= 4).
double geometric_power_sum(int64_t p, int64_t r, int64_t s, int m);

}  // namespace race
