#include "akf/riccati.hpp"

#include <cmath>
#include <stdexcept>

#include "akf/numerics.hpp"

namespace akf {

double RiccatiTrace::phi(std::size_t i, std::size_t j) const {
    if (i > j) throw std::invalid_argument("transition factor: s > t rejected");
    return std::exp(cum_drift[j] - cum_drift[i]);
}

RiccatiTrace solve_riccati(const Coefficient& f, const Coefficient& sigma, const Coefficient& b,
                           const std::function<double(double)>& a_eval, const TimeGrid& grid,
                           double gamma0,
                           const std::function<double(double)>* a_dp_eval) {
    if (gamma0 < 0.0) throw std::invalid_argument("solve_riccati: gamma0 must be >= 0");
    const bool with_dp = a_dp_eval != nullptr;
    const double dt = grid.dt();

    RiccatiTrace tr;
    tr.grid = grid;
    tr.gamma.resize(grid.n_nodes());
    if (with_dp) tr.gamma_dp.resize(grid.n_nodes());

    auto rhs = [&](double t, const std::vector<double>& s, std::vector<double>& d) {
        const double ft = f(t), st = sigma(t), bt = b(t), at = a_eval(t);
        const double q = ft * ft / (st * st);
        d[0] = 2.0 * at * s[0] - q * s[0] * s[0] + bt * bt;
        if (with_dp)
            d[1] = 2.0 * (*a_dp_eval)(t) * s[0] + 2.0 * at * s[1] - 2.0 * q * s[0] * s[1];
    };

    std::vector<double> state(with_dp ? 2 : 1, 0.0);
    state[0] = gamma0;
    // quadratic-decay rate; explicit steps cannot resolve a large start
    {
        const double f0 = f(0.0), s0 = sigma(0.0);
        const double lam = std::abs(2.0 * a_eval(0.0) - 2.0 * f0 * f0 * gamma0 / (s0 * s0));
        if (lam * dt > 2.5)
            throw std::runtime_error(
                "solve_riccati: initial value too stiff for this step; use the closed form");
    }
    rk4_integrate(0.0, dt, grid.steps, state, rhs,
                  [&](std::size_t k, const std::vector<double>& s) {
                      tr.gamma[k] = s[0];
                      if (with_dp) tr.gamma_dp[k] = s[1];
                  });

    tr.drift_eff.resize(grid.n_nodes());
    if (with_dp) tr.drift_eff_dp.resize(grid.n_nodes());
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
        double t = grid.node(k);
        double q = f(t) * f(t) / (sigma(t) * sigma(t));
        tr.drift_eff[k] = a_eval(t) - q * tr.gamma[k];
        if (with_dp) tr.drift_eff_dp[k] = (*a_dp_eval)(t) - q * tr.gamma_dp[k];
    }
    tr.cum_drift = cumtrapz(tr.drift_eff, dt);
    if (with_dp) tr.cum_drift_dp = cumtrapz(tr.drift_eff_dp, dt);
    return tr;
}

RiccatiTrace solve_riccati(const ModelSpecI& spec, const TimeGrid& grid, double gamma0) {
    return solve_riccati(spec.f, spec.sigma, spec.b,
                         [&](double t) { return spec.a(t); }, grid, gamma0);
}

RiccatiTrace solve_riccati(const ModelSpecII& spec, double theta2, const TimeGrid& grid,
                           bool with_derivative, double gamma0) {
    std::function<double(double)> a = [&spec, theta2](double t) { return spec.drift.value(theta2, t); };
    if (!with_derivative)
        return solve_riccati(spec.f, spec.sigma, spec.b, a, grid, gamma0);
    std::function<double(double)> adp = [&spec, theta2](double t) { return spec.drift.d_param(theta2, t); };
    return solve_riccati(spec.f, spec.sigma, spec.b, a, grid, gamma0, &adp);
}

// ---- constant-coefficient closed forms ---------------------------------

double ConstRiccati::value(double t) const {
    const double rr = r(), gp = gamma_plus();
    const double w0 = g0 - gp;
    const double hh = f * f / (2.0 * sigma * sigma * rr);
    const double u = std::exp(-2.0 * rr * t);
    const double den = 1.0 + w0 * hh * (1.0 - u);
    return gp + w0 * u / den;
}

double ConstRiccati::integral(double t) const {
    const double rr = r(), gp = gamma_plus();
    const double w0 = g0 - gp;
    const double hh = f * f / (2.0 * sigma * sigma * rr);
    const double u = std::exp(-2.0 * rr * t);
    const double den = 1.0 + w0 * hh * (1.0 - u);
    return gp * t + sigma * sigma / (f * f) * std::log(den);
}

double ConstRiccati::value_dtheta(double t) const {
    const double rr = r(), gp = gamma_plus();
    const double rdot = theta / rr;
    const double gpdot = sigma * sigma / (f * f) * (1.0 + rdot);
    const double w0 = g0 - gp, w0dot = -gpdot;
    const double hh = f * f / (2.0 * sigma * sigma * rr), hdot = -hh * rdot / rr;
    const double u = std::exp(-2.0 * rr * t), udot = -2.0 * t * rdot * u;
    const double den = 1.0 + w0 * hh * (1.0 - u);
    const double dendot = (w0dot * hh + w0 * hdot) * (1.0 - u) - w0 * hh * udot;
    return gpdot + ((w0dot * u + w0 * udot) * den - w0 * u * dendot) / (den * den);
}

double ConstRiccati::integral_dtheta(double t) const {
    const double rr = r(), gp = gamma_plus();
    const double rdot = theta / rr;
    const double gpdot = sigma * sigma / (f * f) * (1.0 + rdot);
    const double w0 = g0 - gp, w0dot = -gpdot;
    const double hh = f * f / (2.0 * sigma * sigma * rr), hdot = -hh * rdot / rr;
    const double u = std::exp(-2.0 * rr * t), udot = -2.0 * t * rdot * u;
    const double den = 1.0 + w0 * hh * (1.0 - u);
    const double dendot = (w0dot * hh + w0 * hdot) * (1.0 - u) - w0 * hh * udot;
    return gpdot * t + sigma * sigma / (f * f) * dendot / den;
}

double riccati_closed_form(double theta, double f, double sigma, double b,
                           double d2, double eps, double t) {
    if (!(eps > 0.0)) throw std::invalid_argument("riccati_closed_form: eps must be positive");
    ConstRiccati cr{theta, f, sigma, b, d2 / (eps * eps)};
    return cr.value(t);
}

double LimitRiccati::value(double t) const {
    if (!(t > 0.0)) throw std::invalid_argument("limit variance: t must be positive");
    const double rr = r();
    const double x = std::exp(-2.0 * rr * t);
    return gamma_plus() + sigma * sigma / (f * f) * 2.0 * rr * x / (1.0 - x);
}

double LimitRiccati::integral(double s, double t) const {
    if (!(s > 0.0) || t < s) throw std::invalid_argument("limit variance integral: need 0 < s <= t");
    const double rr = r();
    const double xs = std::exp(-2.0 * rr * s), xt = std::exp(-2.0 * rr * t);
    return gamma_plus() * (t - s) + sigma * sigma / (f * f) * (std::log1p(-xt) - std::log1p(-xs));
}

double LimitRiccati::value_dtheta(double t) const {
    if (!(t > 0.0)) throw std::invalid_argument("limit variance: t must be positive");
    const double rr = r(), rdot = theta / rr;
    const double x = std::exp(-2.0 * rr * t);
    const double om = 1.0 - x;
    return sigma * sigma / (f * f) *
           (1.0 + rdot + 2.0 * rdot * x / om - 4.0 * rr * t * rdot * x / (om * om));
}

double LimitRiccati::integral_dtheta(double s, double t) const {
    if (!(s > 0.0) || t < s) throw std::invalid_argument("limit variance integral: need 0 < s <= t");
    const double rr = r(), rdot = theta / rr;
    const double gpdot = sigma * sigma / (f * f) * (1.0 + rdot);
    auto q = [&](double u) {
        double x = std::exp(-2.0 * rr * u);
        return 2.0 * u * rdot * x / (1.0 - x);
    };
    return gpdot * (t - s) + sigma * sigma / (f * f) * (q(t) - q(s));
}

double LimitRiccati::phi(double s, double t) const {
    if (s > t || s < 0.0) throw std::invalid_argument("transition factor: need 0 <= s <= t");
    if (s == t) return 1.0;
    const double rr = r();
    if (s == 0.0) return 0.0;
    const double xs = std::exp(-2.0 * rr * s), xt = std::exp(-2.0 * rr * t);
    return std::exp(-rr * (t - s)) * (1.0 - xs) / (1.0 - xt);
}

double gamma_star_limit(double theta, double f, double sigma, double b, double t) {
    LimitRiccati lr{theta, f, sigma, b};
    return lr.value(t);
}

}  // namespace akf
