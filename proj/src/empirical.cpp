#include "race/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "race/arith.hpp"

namespace race {

std::vector<double> log_grid(double X, int n) {
    if (n < 2 || !(X > 1e3))
        throw std::invalid_argument("log_grid: need n >= 2 and X > 1e3");
    double lo = 3.0, hi = std::log10(X);
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = std::pow(10.0, lo + (hi - lo) * i / (n - 1));
    return g;
}

SievePi::SievePi(int64_t q, int64_t X) : q_(q), X_(X) {
    if (q < 1) throw std::invalid_argument("SievePi: q >= 1 required");
    if (X < 2 || X > 1000000000)
        throw std::invalid_argument("SievePi: X outside [2, 1e9] envelope");
    by_class_.assign(q, {});

    auto base = primes_up_to(static_cast<int64_t>(std::sqrt((double)X)) + 1);
    constexpr int64_t kSegment = 1 << 20;
    std::vector<uint8_t> comp(kSegment);
    for (int64_t lo = 2; lo <= X; lo += kSegment) {
        int64_t hi = std::min(X, lo + kSegment - 1);
        std::fill(comp.begin(), comp.begin() + (hi - lo + 1), 0);
        for (int64_t p : base) {
            if (p * p > hi) break;
            int64_t start = std::max(p * p, ((lo + p - 1) / p) * p);
            for (int64_t m = start; m <= hi; m += p) comp[m - lo] = 1;
        }
        for (int64_t m = lo; m <= hi; ++m)
            if (!comp[m - lo])
                by_class_[m % q].push_back(static_cast<uint32_t>(m));
    }
}

int64_t SievePi::count(int64_t a, double x) const {
    if (x > static_cast<double>(X_))
        throw std::invalid_argument("SievePi::count: x beyond sieved limit");
    a %= q_;
    if (a < 0) a += q_;
    const auto& v = by_class_[a];
    uint32_t cap = static_cast<uint32_t>(std::min(x, 4294967295.0));
    return std::upper_bound(v.begin(), v.end(), cap) - v.begin();
}

int64_t SievePi::count_all(double x) const {
    int64_t total = 0;
    for (int64_t a = 0; a < q_; ++a) total += count(a, x);
    return total;
}

double E_xqa(const SievePi& sieve, int64_t a, double x) {
    if (x < 2.0) throw std::invalid_argument("E_xqa: x >= 2 required");
    auto ctx = ModulusContext::make(sieve.q());
    double phi = static_cast<double>(ctx.phi);
    return std::log(x) / std::sqrt(x) *
           (phi * sieve.count(a, x) - sieve.count_all(x));
}

namespace {

RaceSample make_sample(const SievePi& sieve, std::vector<int64_t> classes,
                       const std::vector<double>& grid) {
    auto ctx = ModulusContext::make(sieve.q());
    double phi = static_cast<double>(ctx.phi);
    RaceSample s;
    s.q = sieve.q();
    s.classes = std::move(classes);
    s.grid = grid;
    s.values.reserve(grid.size());
    for (double x : grid) {
        double v = 0.0;
        for (int64_t a : s.classes)
            v += std::log(x) / std::sqrt(x) *
                 (phi * sieve.count(a, x) - sieve.count_all(x));
        s.values.push_back(v);
    }
    return s;
}

}  // namespace

RaceSample sample_E(const SievePi& sieve, int64_t a,
                    const std::vector<double>& grid) {
    return make_sample(sieve, {a}, grid);
}

RaceSample sample_E_sum(const SievePi& sieve, int64_t a, int64_t b,
                        const std::vector<double>& grid) {
    return make_sample(sieve, {a, b}, grid);
}

LogDensityBreakdown empirical_logdensity_detail(const SievePi& sieve,
                                                int64_t a, int64_t b,
                                                int npoints) {
    auto grid = log_grid(static_cast<double>(sieve.limit()), npoints);
    int win = 0, lose = 0, tie = 0;
    for (double x : grid) {
        int64_t ca = sieve.count(a, x), cb = sieve.count(b, x);
        if (ca > cb) ++win;
        else if (ca < cb) ++lose;
        else ++tie;
    }
    double n = static_cast<double>(npoints);
    return {win / n, lose / n, tie / n};
}

double empirical_logdensity(int64_t q, int64_t a, int64_t b, double X,
                            int npoints) {
    SievePi sieve(q, static_cast<int64_t>(X));
    return empirical_logdensity_detail(sieve, a, b, npoints).win;
}

double mirror_variance_sample(const SievePi& sieve, int64_t a, int64_t b,
                              int n) {
    auto s = sample_E_sum(sieve, a, b,
                          log_grid(static_cast<double>(sieve.limit()), n));
    double mean = 0.0;
    for (double v : s.values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : s.values) ss += (v - mean) * (v - mean);
    return ss / (n - 1);
}

double mirror_variance_sample(int64_t q, int64_t a, int64_t b, double X,
                              int n) {
    SievePi sieve(q, static_cast<int64_t>(X));
    return mirror_variance_sample(sieve, a, b, n);
}

}  // namespace race
