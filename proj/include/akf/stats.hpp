#pragma once

#include <span>
#include <vector>

namespace akf {

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);          // unbiased
double median(std::span<const double> xs);            // midpoint rule on a copy
double quantile(std::span<const double> xs, double q);
double covariance(std::span<const double> xs, std::span<const double> ys);

double normal_cdf(double x);

// One-sample Kolmogorov-Smirnov statistic against N(0, var).
double ks_statistic(std::span<const double> xs, double var);
// Asymptotic critical value c(alpha)/sqrt(n) for alpha in {0.05, 0.01}.
double ks_critical(std::size_t n, double alpha);

struct NormalityCheck {
    std::size_t n = 0;
    double variance_ratio = 0.0;  // sample variance / target
    double ks = 0.0;
    bool var_pass = false;        // two-sided 5% (normal approximation)
    bool ks_pass = false;         // 1%
    bool heavy_tail = false;      // sd inconsistent with the IQR-implied sd
    std::size_t dropped_nonfinite = 0;
};
// Distributional check of centered samples against N(0, target_variance).
// Cauchy-like samples trip the heavy-tail flag (sample sd far above the
// robust IQR-based estimate) and fail the variance test by construction.
NormalityCheck normality_check(std::span<const double> samples, double target_variance);

struct RateFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    bool ok = false;   // false on degenerate (zero/negative) summaries
};
// Least-squares slope of log(summary) against log(eps). Summaries are
// typically medians: stable for the heavy-tailed estimators whose moments do
// not converge.
RateFit rate_fit(std::span<const double> eps, std::span<const double> summary);

}  // namespace akf
