#include "akf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace akf {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty sample");
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("variance: need at least 2 samples");
    double m = mean(xs), acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return acc / static_cast<double>(xs.size() - 1);
}

double quantile(std::span<const double> xs, double q) {
    if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    double pos = q * static_cast<double>(v.size() - 1);
    std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= v.size()) return v.back();
    double w = pos - static_cast<double>(i);
    return v[i] * (1.0 - w) + v[i + 1] * w;
}

double median(std::span<const double> xs) { return quantile(xs, 0.5); }

double covariance(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("covariance: mismatched or short samples");
    double mx = mean(xs), my = mean(ys), acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) acc += (xs[i] - mx) * (ys[i] - my);
    return acc / static_cast<double>(xs.size() - 1);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double ks_statistic(std::span<const double> xs, double var) {
    if (xs.empty() || !(var > 0.0)) throw std::invalid_argument("ks_statistic: bad input");
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    const double sd = std::sqrt(var);
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double fi = normal_cdf(v[i] / sd);
        double lo = static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(fi - lo, hi - fi));
    }
    return d;
}

double ks_critical(std::size_t n, double alpha) {
    double c;
    if (alpha <= 0.01)
        c = 1.62762;
    else if (alpha <= 0.05)
        c = 1.35810;
    else
        c = 1.22385;  // 10%
    return c / std::sqrt(static_cast<double>(n));
}

NormalityCheck normality_check(std::span<const double> samples, double target_variance) {
    if (!(target_variance > 0.0) || !std::isfinite(target_variance))
        throw std::invalid_argument("normality_check: target variance must be positive finite");
    std::vector<double> v;
    v.reserve(samples.size());
    std::size_t dropped = 0;
    for (double x : samples) {
        if (std::isfinite(x))
            v.push_back(x);
        else
            ++dropped;
    }
    if (v.size() < 100)
        throw std::invalid_argument("normality_check: need at least 100 finite samples");

    NormalityCheck out;
    out.n = v.size();
    out.dropped_nonfinite = dropped;
    const double s2 = variance(v);
    out.variance_ratio = s2 / target_variance;
    // two-sided 5% on the variance ratio, normal approximation to chi^2
    const double half_width = 1.959964 * std::sqrt(2.0 / static_cast<double>(v.size() - 1));
    out.var_pass = std::abs(out.variance_ratio - 1.0) <= half_width;
    out.ks = ks_statistic(v, target_variance);
    out.ks_pass = out.ks <= ks_critical(v.size(), 0.01);

    // heavy tails: sample sd far above the IQR-implied sd of a Gaussian
    const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
    const double robust_sd = iqr / 1.348979500392;
    out.heavy_tail = robust_sd > 0.0 && std::sqrt(s2) > 1.5 * robust_sd;
    return out;
}

RateFit rate_fit(std::span<const double> eps, std::span<const double> summary) {
    RateFit rf;
    if (eps.size() != summary.size() || eps.size() < 4) return rf;  // need >= 4 points
    double lo = eps.front(), hi = eps.front();
    for (double e : eps) {
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    if (!(hi >= 99.0 * lo)) return rf;  // need >= 2 decades of spread
    std::vector<double> lx(eps.size()), ly(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0) || !(summary[i] > 0.0)) return rf;  // degenerate summary
        lx[i] = std::log(eps[i]);
        ly[i] = std::log(summary[i]);
    }
    const double n = static_cast<double>(eps.size());
    double mx = mean(lx), my = mean(ly);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    rf.slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        double r = ly[i] - my - rf.slope * (lx[i] - mx);
        rss += r * r;
    }
    rf.stderr_slope = std::sqrt(rss / (n - 2.0) / sxx);
    rf.ok = true;
    return rf;
}

}  // namespace akf
