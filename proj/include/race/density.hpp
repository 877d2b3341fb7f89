#pragma once

/**
 * @file density.hpp
 * @brief The logarithmic densities delta(q;a,b) by three routes, plus the
 * quadratic-residue race and supporting series machinery.
 *
 * Routes:
 *  - delta_zeros_quadrature: the Feuerverger-Martin integral of sin(rho x)/x
 *    against the characteristic-function product Phi over L-function zeros;
 *    the workhorse for small moduli where the variance is small.
 *  - delta_erf_bounds: certified two-sided bounds from the explicit
 *    small-interval estimate; requires V(q;a,b) >= 531.
 *  - delta_series / delta_order2_arithmetic: asymptotic expansions in 1/V,
 *    the latter entirely in arithmetic terms (no L-values, no zeros).
 *
 * Series support: the exact rational coefficients lambda_{2m} of log J0, the
 * s(l,j) coefficients of the asymptotic series, and the cumulant ratios W_n.
 */

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "race/lfun.hpp"

namespace race {

using BigRat = boost::multiprecision::cpp_rational;

// -----------------------------------------------------------------------------
// Results
// -----------------------------------------------------------------------------

struct ErrorTerm {
    std::string name;
    double value = 0.0;
    bool heuristic = false;  // true when the constant is calibrated, not proved
};

struct DensityResult {
    int64_t q = 0;
    int64_t a = 0;  // 0 for the N vs R race
    int64_t b = 0;  // 0 for the N vs R race
    bool nr = false;
    double value = 0.5;
    double lower = 0.0;
    double upper = 1.0;
    std::string method;  // "erf_bounds", "series0", "series1",
                         // "zeros_quadrature", "NR_erf", "NR_zeros",
                         // "order2_arithmetic", "symmetric"
    std::vector<ErrorTerm> error_budget;

    double width() const { return upper - lower; }
};

// -----------------------------------------------------------------------------
// Series coefficients
// -----------------------------------------------------------------------------

// lambda_{2m} for m = 1..mmax: the coefficients of log J0(z) = sum lambda_n
// z^n (odd-index coefficients vanish), computed by exact rational composition
// of log(1+u) with the J0 power series.  lambda_2 = -1/4, lambda_4 = -1/64,
// and every lambda_{2m} is negative.
std::vector<BigRat> bessel_log_coeffs(int mmax);

// s(l, j) of the asymptotic series: the constrained sum over i_2..i_{l+1}
// with i_2 + 2 i_3 + ... + l i_{l+1} = l - j of double factorials against
// prod (-W_k)^{i_k} / i_k!, scaled by (-1)^j / (2j+1)!.  W[k-1] holds W_k;
// entries above index l are not read.  s(0,0) = 1, s(1,1) = -1/6,
// s(1,0) = -3 W_2.
double s_coeff(int ell, int j, const std::vector<double>& W);

struct SeriesCoefficients {
    std::vector<double> lambda;      // lambda_{2m}, m = 1..size
    std::vector<double> W;           // W_1..W_K+1 with W[0] = 1/2
    std::vector<std::vector<double>> s_table;  // s_table[l][j], l <= K
};

struct WnResult {
    double value = 0.0;
    double tail_bound = 0.0;  // McCurley bound on the omitted gamma > T part
};

// W_n(q;a,b) = 4^n |lambda_{2n}| / V * sum_chi |chi(a)-chi(b)|^{2n}
//              sum_{0 < gamma <= T} (1/4 + gamma^2)^{-n}.
// W_1 recovers 1/2 up to the reported tail.
WnResult W_n_from_zeros(int64_t q, int64_t a, int64_t b, int n,
                        ZeroCache& cache, double T);

// -----------------------------------------------------------------------------
// Phi: the characteristic-function product over zeros
// -----------------------------------------------------------------------------

enum class PhiTailMode { compensated, none };

/**
 * Phi(x) = prod_{chi mod q} prod_{0 < gamma <= T}
 *            J0(2 |chi(a)-chi(b)| x / sqrt(1/4 + gamma^2)),
 * times (in compensated mode) the quadratic tail factor
 * exp(-x^2/2 * sum_chi |chi(a)-chi(b)|^2 tail1(chi)) accounting for the
 * zeros above T through tail1(chi) = b(chi) - 2 sum_{gamma <= T}; each
 * omitted J0 factor contributes -w x^2/(1/4+gamma^2) to log Phi at leading
 * order, and summing over gamma > T gives exactly x^2/2 * w * tail1.
 *
 * Immutable after construction; evaluation is thread-safe.
 */
class PhiProduct {
  public:
    PhiProduct(int64_t q, int64_t a, int64_t b, ZeroCache& cache, double T,
               PhiTailMode mode = PhiTailMode::compensated);

    // Constructor for the N vs R race: the product runs over the zeros of the
    // single quadratic character, with scale factors 2/sqrt(1/4+gamma^2).
    PhiProduct(const ZeroList& quadratic_zeros, double tail1,
               PhiTailMode mode = PhiTailMode::compensated);

    double operator()(double x) const;

    // Decreasing envelope: product of min(1, sqrt(2/(pi c_k x))) per retained
    // factor, with a 1.1 safety margin on the oscillatory amplitude bound.
    double envelope(double x) const;

    size_t factor_count() const { return c_.size(); }
    double tail_coefficient() const { return tail_coeff_; }

    // sum of |chi(a)-chi(b)|^2 times the multiplicity of central zeros
    // (L(1/2, chi) = 0) among the characters weighting this race.  Nonzero
    // weight means the limiting distribution acquires a mean shift that the
    // sin(rho x)/x integrand does not model.
    double central_weight() const { return central_weight_; }

  private:
    void finalize();

    std::vector<double> c_;  // scale factors, sorted descending
    std::vector<double> suffix2_, suffix4_, suffix6_, suffix8_;
    double tail_coeff_ = 0.0;  // x^2 coefficient of the compensation factor
    double central_weight_ = 0.0;
};

// -----------------------------------------------------------------------------
// Density computations
// -----------------------------------------------------------------------------

struct QuadConfig {
    double T = 2500.0;        // zero height per character
    double target = 1e-10;    // absolute quadrature tolerance
    double envelope_cut = 1e-14;  // truncation threshold for |Phi|
};

// a nonsquare, b square mod q.  Throws otherwise.
DensityResult delta_zeros_quadrature(int64_t q, int64_t a, int64_t b,
                                     ZeroCache& cache, QuadConfig cfg = {});

// Certified interval from the explicit-bounds estimate; V(q;a,b) >= 531
// required.  value is the interval midpoint.
DensityResult delta_erf_bounds(int64_t q, int64_t a, int64_t b);

// Asymptotic series through order K (K <= 1): 1/2 + rho/sqrt(2 pi V) *
// sum_{l <= K} V^{-l} sum_j rho^{2j} s(l,j), with W_2 = U/V taken from the
// closed second-cumulant formula so no zero data is needed.  The error
// constant C_K is heuristic (calibrated against quadrature).
DensityResult delta_series(int64_t q, int64_t a, int64_t b, int K);

enum class NRMethod { erf, zeros };

// The race between all nonresidues and all residues; requires rho(q) = 2.
// The normalized difference has mean 1 and zero coefficients
// 2/sqrt(1/4+gamma^2) over the quadratic character chi1, with variance
// V = b(chi1).  method erf: 1/2 + Erf(1/sqrt(2V))/2; method zeros: the
// sin(x)/x integral against the J0 product over chi1's zeros (cache
// required).
DensityResult delta_NR(int64_t q, NRMethod method, ZeroCache* cache = nullptr,
                       double T = 2500.0);

// Order-2 arithmetic-only formula.  The three Lambda(n)/n correction sums
// nominally run over q <= n <= q^4; y <= 0 selects min(q^4, 2e8).
DensityResult delta_order2_arithmetic(int64_t q, int64_t a, int64_t b,
                                      double y = 0.0);

// Convenience dispatcher used by the command-line surface: handles the
// both-squares/both-nonsquares symmetric case (exactly 1/2), orientation
// (a square, b nonsquare computed as 1 - delta(q;b,a)), and method choice
// (erf when V >= 531, zeros quadrature otherwise).
DensityResult delta_auto(int64_t q, int64_t a, int64_t b, ZeroCache& cache,
                         QuadConfig cfg = {});

// -----------------------------------------------------------------------------
// Plot normalization
// -----------------------------------------------------------------------------

struct PlotPoint {
    double x = 0.0;
    double y = 0.0;
};

// (q, sqrt(pi (q-1)) * log(q / 2 pi e^{gamma0})^{3/2} * (delta - 1/2)
//     - log(q / 2 pi e^{gamma0})), for prime q.
PlotPoint normalized_plot_coords(int64_t q, int64_t a, double delta);

// Inverse of the y-coordinate map.
double delta_from_plot_y(int64_t q, double y);

}  // namespace race
