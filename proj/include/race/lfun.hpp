#pragma once

/**
 * @file lfun.hpp
 * @brief Numerical Dirichlet L-function kernel.
 *
 * Two independent routes to L'(1,chi)/L(1,chi) guard against implementation
 * bugs: a Hurwitz-zeta Euler-Maclaurin evaluation carried on degree-2 jets in
 * (s-1) (the certified workhorse, good to ~1e-12 for conductors up to 1e4),
 * and the smoothed von Mangoldt sum whose error constants are fully explicit.
 *
 * Zeros on the critical line come from a sign-change scan of the rotated
 * completed function; only the phase of the Gamma factor is used, so nothing
 * under- or overflows even at height 2500.  Zero lists can also be ingested
 * from text files (one ascending ordinate per line, optional '#' headers).
 */

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "race/characters.hpp"

namespace race {

using cplx = std::complex<double>;

// -----------------------------------------------------------------------------
// Degree-2 jets in h = s-1: c0 + c1 h + c2 h^2
// -----------------------------------------------------------------------------

struct Jet3 {
    cplx c0{0.0}, c1{0.0}, c2{0.0};

    Jet3& operator+=(const Jet3& o) {
        c0 += o.c0; c1 += o.c1; c2 += o.c2;
        return *this;
    }
    friend Jet3 operator*(const Jet3& a, const Jet3& b) {
        return {a.c0 * b.c0, a.c0 * b.c1 + a.c1 * b.c0,
                a.c0 * b.c2 + a.c1 * b.c1 + a.c2 * b.c0};
    }
    friend Jet3 operator*(cplx s, const Jet3& a) {
        return {s * a.c0, s * a.c1, s * a.c2};
    }
    friend Jet3 operator+(Jet3 a, const Jet3& b) { return a += b; }
};

// Regular part of zeta(1+h, x) (the 1/h pole removed), as a jet.
// Euler-Maclaurin with K terms; K=48 gives ~1e-13 for x in (0,1].
Jet3 hurwitz_regular_jet(double x, int K = 48);

// -----------------------------------------------------------------------------
// L-values at s = 1
// -----------------------------------------------------------------------------

struct LValueBundle {
    int64_t conductor = 0;
    int64_t label = 0;
    cplx L;    // L(1, chi)
    cplx L1;   // L'(1, chi)
    cplx L2;   // L''(1, chi)
    double err = 0.0;  // certified absolute error per entry
};

// Values for a primitive nonprincipal character; memoized by (q*, label).
const LValueBundle& L_derivatives_at_1(const DirichletCharacter& chi_star);

struct LogDerivs {
    cplx l1;  // L'/L at s=1
    cplx l2;  // L''/L at s=1
};

// L'/L and L''/L at s=1 for chi itself (imprimitive allowed: the primitive
// bundle is multiplied by the finite Euler factors as exact jets).
LogDerivs log_derivatives(const DirichletCharacter& chi);

// L'/L(1, chi*) for the primitive character inducing chi.
cplx logderiv_primitive(const DirichletCharacter& chi);

// -----------------------------------------------------------------------------
// Smoothed log-derivative sums (explicit-constant route)
// -----------------------------------------------------------------------------

struct SmoothedLogDeriv {
    cplx value;
    double error_bound;  // (14.27 log q + 16.25)/y^{1/2} + (16.1 log q + 17.83)/y^{3/4}
};

SmoothedLogDeriv logderiv_smoothed(const DirichletCharacter& chi, double y);

// sum over n == a (mod q), n <= cutoff, of Lambda(n) e^{-n/y} / n;
// with y = q^2 this is Lambda(a)/a + O((2 log^2 q + 3.935 log q)/q).
double smoothed_class_sum(int64_t q, int64_t a, double y);

// -----------------------------------------------------------------------------
// b(chi) and friends
// -----------------------------------------------------------------------------

// b(chi) = log(q*/pi) - gamma0 - (1+chi(-1)) log 2 + 2 Re L'/L(1, chi*).
double b_chi_closed(const DirichletCharacter& chi);

// -----------------------------------------------------------------------------
// Zero lists
// -----------------------------------------------------------------------------

struct ZeroList {
    int64_t q = 0;          // modulus of the character the list was built for
    int64_t label = 0;      // Conrey label of that character
    int64_t conductor = 0;  // conductor q* (zeros are those of L(s, chi*))
    std::vector<double> ordinates;  // ascending, all > 0
    double height = 0.0;    // covered height T
    std::string source;     // "internal-finder" or "file"
    // Multiplicity of a zero at the central point s = 1/2 (gamma = 0), as
    // detected by the b(chi) consistency check: each such zero contributes
    // exactly 4 to b(chi).  These do occur (the first example below conductor
    // 200 is chi with label 44 mod 101) and they fall outside the linear
    // independence model: they shift the mean of the race distribution
    // instead of contributing an oscillating factor.
    int central = 0;

    // 2 sum_{0<gamma<=T} (1/4+gamma^2)^{-n}
    double partial_b_sum(int n = 1) const;
};

struct NTBounds {
    double lower = 0.0;  // valid for T >= 100
    double upper = 0.0;  // valid for T >= 1
};

// McCurley's explicit window for N(T, chi) (zeros with |gamma| <= T).
NTBounds N_T_bounds(int64_t qstar, double T);

// Upper bound on the tail sum over a single character's zeros beyond T:
// sum_{|gamma|>T} (1/4+gamma^2)^{-n}, via the McCurley counting bounds.
double zero_tail_bound(int64_t qstar, double T, int n = 1);

// b_n from a zero list: value plus a reported tail bound.  For n=1 the exact
// tail can instead be taken from b_chi_closed by the caller.
struct BnResult {
    double value = 0.0;      // 2 sum_{gamma<=T} (1/4+gamma^2)^{-n}
    double tail_bound = 0.0;
};

BnResult b_n_from_zeros(const ZeroList& zl, int n);

// -----------------------------------------------------------------------------
// Zero finding
// -----------------------------------------------------------------------------

// Root number from the normalized Gauss sum; |epsilon| = 1 to 1e-10.
cplx root_number(const DirichletCharacter& chi_star);

// All ordinates in (0, T] of L(s, chi) for a primitive nonprincipal chi,
// located to ~1e-9.  For real chi the count is checked against the McCurley
// window and the b(chi) tail-consistency test; a shortfall triggers one
// rescan at one-quarter step before throwing.  Supported envelope:
// conductor <= 200 (larger conductors work but are unvalidated), T <= 5000.
ZeroList find_zeros(const DirichletCharacter& chi_star, double T);

// Complex characters come in conjugate pairs whose zero sets reflect through
// the real axis; the McCurley count applies to the union.  Returns the lists
// for chi and for its conjugate.
std::pair<ZeroList, ZeroList> find_zeros_pair(const DirichletCharacter& chi_star,
                                              double T);

// Value of the rotated completed function whose sign changes locate zeros
// (exposed for residual checks in tests).
double hard_zero_function(const DirichletCharacter& chi_star, double t);

// -----------------------------------------------------------------------------
// Zero file IO and cache
// -----------------------------------------------------------------------------

ZeroList load_zeros(const std::string& path);
void save_zeros(const ZeroList& zl, const std::string& path);

/**
 * Disk-backed cache of finder output, keyed by (conductor, label).  Directory
 * resolution: explicit argument, else $RACE_ZEROS_DIR, else "./zeros".
 * Files use the text format of load_zeros: zeros/q<q>.chi<label>.txt.
 */
class ZeroCache {
  public:
    explicit ZeroCache(std::string dir = "");
    const std::string& dir() const { return dir_; }

    // Load if a file with sufficient height exists, else compute and save.
    ZeroList get(const DirichletCharacter& chi_star, double T);

  private:
    std::string dir_;
};

}  // namespace race
