#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "akf/coefficient.hpp"
#include "akf/grid.hpp"
#include "akf/model.hpp"

namespace akf {

// Rescaled conditional-variance equation
//   gamma' = 2 a(t) gamma - f(t)^2 gamma^2 / sigma(t)^2 + b(t)^2
// together with the effective drift A(t) = a - f^2 gamma / sigma^2 and its
// cumulative integral. Transition factors come from the cumulative integral,
// so the flow property holds to rounding and no O(N^2) table is needed.
struct RiccatiTrace {
    TimeGrid grid;
    std::vector<double> gamma;
    std::vector<double> drift_eff;      // A at nodes
    std::vector<double> cum_drift;      // trapezoid cumulative of A from 0
    // Filled when the parameter derivative is requested (joint variational solve):
    std::vector<double> gamma_dp;       // d gamma / d parameter
    std::vector<double> drift_eff_dp;   // dA/dp = da/dp - f^2 gamma_dp / sigma^2
    std::vector<double> cum_drift_dp;

    bool has_derivative() const { return !gamma_dp.empty(); }

    double phi(std::size_t i, std::size_t j) const;   // transition factor node i -> j, i <= j
    double phi0(std::size_t j) const { return std::exp(cum_drift[j]); }
    // One-step propagation factor exp(integral of A over step k); shared by the
    // filter recursions so decompositions stay exact at the discrete level.
    double step_factor(std::size_t k) const { return std::exp(cum_drift[k + 1] - cum_drift[k]); }
};

// RK4 solve on the grid. a_eval/a_dp_eval are continuous-time callables so the
// half-step stage evaluations are well defined. Throws when the step size
// cannot resolve the quadratic decay from a large initial value (the caller
// must use the constant-coefficient closed form instead).
RiccatiTrace solve_riccati(const Coefficient& f, const Coefficient& sigma, const Coefficient& b,
                           const std::function<double(double)>& a_eval, const TimeGrid& grid,
                           double gamma0,
                           const std::function<double(double)>* a_dp_eval = nullptr);

RiccatiTrace solve_riccati(const ModelSpecI& spec, const TimeGrid& grid, double gamma0 = 0.0);
RiccatiTrace solve_riccati(const ModelSpecII& spec, double theta2, const TimeGrid& grid,
                           bool with_derivative = false, double gamma0 = 0.0);

// Constant-coefficient solution with gamma(0) = g0, written through
// r = sqrt(theta^2 + b^2 f^2 / sigma^2) and gamma_plus = sigma^2/f^2 (theta + r):
//   gamma(t) = gamma_plus + e^{-2rt} / (v0 + h (1 - e^{-2rt}))
// with v0 = 1/(g0 - gamma_plus), h = f^2 / (2 sigma^2 r). The time integral is
// available in closed form, which is what makes the stiff d^2/eps^2 start
// tractable without resolving the boundary layer numerically.
struct ConstRiccati {
    double theta, f, sigma, b, g0;

    double r() const { return std::sqrt(theta * theta + b * b * f * f / (sigma * sigma)); }
    double gamma_plus() const { return sigma * sigma / (f * f) * (theta + r()); }
    double value(double t) const;
    double integral(double t) const;          // int_0^t gamma
    double value_dtheta(double t) const;
    double integral_dtheta(double t) const;
};

// value at t of the constant-coefficient solution started from d^2/eps^2
double riccati_closed_form(double theta, double f, double sigma, double b,
                           double d2, double eps, double t);

// Small-noise limit of the same solution, valid for t > 0:
//   gamma_lim(t) = sigma^2/f^2 [ theta + r + 2 r / (e^{2 r t} - 1) ]
// Uniformly within O(eps^2) of the exact solution on [tau, T].
struct LimitRiccati {
    double theta, f, sigma, b;

    double r() const { return std::sqrt(theta * theta + b * b * f * f / (sigma * sigma)); }
    double gamma_plus() const { return sigma * sigma / (f * f) * (theta + r()); }
    double value(double t) const;
    double integral(double s, double t) const;   // int_s^t, s > 0 (s = 0 diverges)
    double value_dtheta(double t) const;
    double integral_dtheta(double s, double t) const;
    // Transition factor exp(int_s^t [theta - f^2 gamma_lim / sigma^2]); the
    // s = 0 endpoint gives exactly 0 (the divergent start absorbs it).
    double phi(double s, double t) const;
};

double gamma_star_limit(double theta, double f, double sigma, double b, double t);

}  // namespace akf
