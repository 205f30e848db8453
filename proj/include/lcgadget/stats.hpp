#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace lcg {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double half_width() const { return 0.5 * (hi - lo); }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

// Neumaier-compensated summation.
class CompensatedSum {
public:
    void add(double x);
    double value() const { return sum_ + comp_; }
    CompensatedSum& operator+=(const CompensatedSum& other);

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// First four raw moments of a stream, kept with compensated sums so chunked
// reductions are reproducible regardless of how chunks were scheduled.
class Moments {
public:
    void add(double x);
    Moments& operator+=(const Moments& other);

    std::uint64_t count() const { return n_; }
    double mean() const;
    // Unbiased sample variance.
    double variance() const;
    double stderr_mean() const;
    // Standard error of the sample variance (normal approximation using the
    // fourth central moment).
    double stderr_variance() const;

private:
    std::uint64_t n_ = 0;
    CompensatedSum s1_, s2_, s3_, s4_;
};

double normal_cdf(double x);

// 95% (z = 1.96 by default) Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z = 1.959963984540054);

// Standard normal quantile for a one-sided upper tail of alpha (Acklam's
// rational approximation refined by one Newton step).
double normal_upper_quantile(double alpha);

double log_binomial(std::uint64_t n, std::uint64_t k);

// Ordinary least-squares slope of y on x.
double fit_slope(std::span<const double> x, std::span<const double> y);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Critical value of the two-sample KS statistic at level alpha from the
// two-sample DKW form Pr[D > eps] <= 2 exp(-2 eps^2 nm/(n+m)).
double dkw_two_sample_threshold(std::uint64_t n, std::uint64_t m, double alpha);

// Hoeffding: Pr[|sum - E sum| > t] <= 2 exp(-2 t^2 / sum range_i^2).
double hoeffding_tail(double t, std::span<const double> ranges);

// Chebyshev: Pr[|X| > t] <= E[X^2] / t^2.
double chebyshev_bound(double second_moment, double t);

} // namespace lcg
