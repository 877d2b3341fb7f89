#pragma once

/**
 * @file empirical.hpp
 * @brief Direct prime-counting replication: segmented sieve, pi(x;q,a), the
 * normalized error terms E(x;q,a), empirical logarithmic densities, and the
 * mirror-variance experiment behind the observed-variance table for q = 11.
 */

#include <cstdint>
#include <vector>

namespace race {

// The fixed logarithmic sampling grid: x_i = 10^{3 + (log10 X - 3) i/(n-1)}
// for i = 0..n-1.  With X = 1e7 and n = 400 this is the deterministic grid
// of the mirror-variance experiment.
std::vector<double> log_grid(double X, int n);

/**
 * Exact prime counts in every reduced class mod q, queryable at any x <= X.
 * Built by a segmented sieve; stores one sorted array of primes per class,
 * so a count is a binary search.  Memory is about 4 bytes per prime
 * (X <= 1e9 envelope, about 203 MB at the extreme; the intended desk scale
 * is X <= 1e7).  Immutable after construction.
 */
class SievePi {
  public:
    SievePi(int64_t q, int64_t X);

    int64_t q() const { return q_; }
    int64_t limit() const { return X_; }

    // pi(x;q,a): primes p <= x with p == a (mod q).  a need not be reduced;
    // classes sharing a factor with q hold only the primes dividing q.
    int64_t count(int64_t a, double x) const;

    // pi(x), including the primes dividing q.
    int64_t count_all(double x) const;

  private:
    int64_t q_ = 0;
    int64_t X_ = 0;
    std::vector<std::vector<uint32_t>> by_class_;  // indexed by residue
};

// E(x;q,a) = (log x / sqrt x) (phi(q) pi(x;q,a) - pi(x)).
double E_xqa(const SievePi& sieve, int64_t a, double x);

// One sampled trajectory of E(x;q,a) (or, via make_sum, of a sum of two).
struct RaceSample {
    int64_t q = 0;
    std::vector<int64_t> classes;
    std::vector<double> grid;    // strictly increasing
    std::vector<double> values;  // same length as grid
};

RaceSample sample_E(const SievePi& sieve, int64_t a, const std::vector<double>& grid);
RaceSample sample_E_sum(const SievePi& sieve, int64_t a, int64_t b,
                        const std::vector<double>& grid);

struct LogDensityBreakdown {
    double win = 0.0;   // fraction of grid points with pi(x;q,a) > pi(x;q,b)
    double lose = 0.0;  // fraction with <
    double tie = 0.0;   // fraction with =
};

LogDensityBreakdown empirical_logdensity_detail(const SievePi& sieve,
                                                int64_t a, int64_t b,
                                                int npoints);

// The win fraction over npoints log-uniform grid points in [1e3, X]; ties
// count toward neither side.
double empirical_logdensity(int64_t q, int64_t a, int64_t b, double X,
                            int npoints);

// Sample variance (n-1 denominator) of E(x;q,a) + E(x;q,b) over the fixed
// n-point grid in [1e3, X].
double mirror_variance_sample(const SievePi& sieve, int64_t a, int64_t b,
                              int n = 400);
double mirror_variance_sample(int64_t q, int64_t a, int64_t b, double X = 1e7,
                              int n = 400);

}  // namespace race
