#include "akf/estim3.hpp"

#include <cmath>
#include <stdexcept>

#include "akf/numerics.hpp"

namespace akf {

double derivative_estimate(std::span<const double> x_nodes, const TimeGrid& grid,
                           double t, double eps) {
    const double window = std::pow(eps, 2.0 / 3.0);
    const std::size_t w = grid.ceil_index(window);
    if (w < 2)
        throw std::invalid_argument("derivative_estimate: grid too coarse for the eps^(2/3) window");
    const std::size_t k = grid.index_of(t);
    if (k + w > grid.steps)
        throw std::invalid_argument("derivative_estimate: window leaves the horizon");
    const double dt_w = grid.node(k + w) - grid.node(k);
    return (x_nodes[k + w] - x_nodes[k]) / dt_w;
}

namespace {

Mme3Result log_ratio_at_nodes(std::span<const double> x_nodes, const TimeGrid& grid,
                              std::size_t n1, std::size_t n2, double eps,
                              const Interval& bounds, double floor) {
    Mme3Result r;
    const double d1 = derivative_estimate(x_nodes, grid, grid.node(n1), eps);
    const double d2 = derivative_estimate(x_nodes, grid, grid.node(n2), eps);
    if (std::abs(d1) < floor && std::abs(d2) < floor) {
        r.informative = false;   // the path carries no slope information
        r.value = bounds.clamp(0.0);
        return r;
    }
    const double a1 = std::max(std::abs(d1), floor);
    const double a2 = std::max(std::abs(d2), floor);
    r.value = bounds.clamp((std::log(a2) - std::log(a1)) / (grid.node(n2) - grid.node(n1)));
    return r;
}

}  // namespace

Mme3Result mme_log_ratio(std::span<const double> x_nodes, const TimeGrid& grid,
                         double t1, double t2, double eps, const Interval& bounds,
                         double floor) {
    if (!(t1 < t2)) throw std::invalid_argument("mme_log_ratio: need t1 < t2");
    return log_ratio_at_nodes(x_nodes, grid, grid.index_of(t1), grid.index_of(t2), eps,
                              bounds, floor);
}

Mme3Result mme_shrinking_window(std::span<const double> x_nodes, const TimeGrid& grid,
                                double p1, double p2, double eps, const Interval& bounds,
                                double floor) {
    if (!(p1 > 0.0) || !(p2 > p1))
        throw std::invalid_argument("mme_shrinking_window: need 0 < p1 < p2");
    const double scale = std::log(1.0 / eps);
    if (!(scale > 0.0)) throw std::invalid_argument("mme_shrinking_window: eps must be < 1");
    const double t1 = p1 / scale, t2 = p2 / scale;
    if (!(t2 < grid.horizon))
        throw std::invalid_argument("mme_shrinking_window: evaluation point beyond horizon");
    const auto n1 = static_cast<std::size_t>(std::llround(t1 / grid.dt()));
    const auto n2 = static_cast<std::size_t>(std::llround(t2 / grid.dt()));
    if (n1 < 1 || n2 <= n1)
        throw std::invalid_argument("mme_shrinking_window: points collapse below grid resolution");
    return log_ratio_at_nodes(x_nodes, grid, n1, n2, eps, bounds, floor);
}

Model3Filter filter_sensitivity_iii(const ModelSpecIII& spec, double theta,
                                    std::span<const double> dx, double tau,
                                    const TimeGrid& grid) {
    if (!(tau > 0.0)) throw std::invalid_argument("filter_sensitivity_iii: tau must be positive");
    const std::size_t tau_node = grid.index_of(tau);
    if (tau_node == 0 || tau_node >= grid.steps)
        throw std::invalid_argument("filter_sensitivity_iii: tau must be an interior node");
    const std::size_t n = grid.steps;
    const double dt = grid.dt();
    const double q = spec.f * spec.f / (spec.sigma * spec.sigma);

    Model3Filter out;
    out.tau_node = tau_node;
    out.m.assign(n + 1, 0.0);
    out.mdot.assign(n + 1, 0.0);
    out.fisher_emp.assign(n + 1, 0.0);

    // [0, tau]: exact variance from d^2/eps^2. The integrating-factor step
    // uses the closed-form time integral of the variance, so the decay layer
    // near 0 costs nothing; the loading term integrates the transition factor
    // against a constant increment density over the step.
    ConstRiccati cr{theta, spec.f, spec.sigma, spec.b, spec.d2 / (spec.eps * spec.eps)};
    double gi_prev = 0.0, gi_dot_prev = 0.0;
    for (std::size_t k = 0; k < tau_node; ++k) {
        const double t1 = grid.node(k + 1);
        const double gi = cr.integral(t1), gi_dot = cr.integral_dtheta(t1);
        const double p = std::exp(theta * dt - q * (gi - gi_prev));
        const double pdot = p * (dt - q * (gi_dot - gi_dot_prev));
        const double load = (theta * 0.5 * (1.0 + p) * dt + (1.0 - p)) / spec.f;
        const double load_dot =
            (0.5 * (1.0 + p) * dt + theta * 0.5 * pdot * dt - pdot) / spec.f;
        const double density = dx[k] / dt;
        out.mdot[k + 1] = pdot * out.m[k] + p * out.mdot[k] + density * load_dot;
        out.m[k + 1] = p * out.m[k] + density * load;
        gi_prev = gi;
        gi_dot_prev = gi_dot;
    }

    // [tau, T]: small-noise limit variance, explicit Euler; the derivative
    // recursion is the exact parameter derivative of the mean recursion.
    LimitRiccati lr{theta, spec.f, spec.sigma, spec.b};
    for (std::size_t k = tau_node; k < n; ++k) {
        const double t = grid.node(k);
        const double g = lr.value(t), gdot = lr.value_dtheta(t);
        const double drift_eff = theta - q * g;
        const double drift_eff_dot = 1.0 - q * gdot;
        const double gain = spec.f * g / (spec.sigma * spec.sigma);
        const double gain_dot = spec.f * gdot / (spec.sigma * spec.sigma);
        out.mdot[k + 1] = out.mdot[k] + (drift_eff_dot * out.m[k] + drift_eff * out.mdot[k]) * dt +
                          gain_dot * dx[k];
        out.m[k + 1] = out.m[k] + drift_eff * out.m[k] * dt + gain * dx[k];
    }

    for (std::size_t k = tau_node; k < n; ++k)
        out.fisher_emp[k + 1] = out.fisher_emp[k] +
                                0.5 * dt * q * (out.mdot[k] * out.mdot[k] + out.mdot[k + 1] * out.mdot[k + 1]);
    return out;
}

std::vector<double> j_limit_trace(const ModelSpecIII& spec, double theta0, double tau,
                                  const TimeGrid& grid) {
    const std::size_t tau_node = grid.index_of(tau);
    const std::size_t n = grid.steps;
    const double dt = grid.dt();
    const double q = spec.f * spec.f / (spec.sigma * spec.sigma);
    LimitRiccati lr{theta0, spec.f, spec.sigma, spec.b};

    // gbar(t) = int_0^t phi_lim(s, t) e^{theta0 s} ds, stepped with the exact
    // one-step transition factor; gbar(0) = 0 and the factor from 0 vanishes.
    std::vector<double> gbar(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double t0 = grid.node(k), t1 = grid.node(k + 1);
        const double p = lr.phi(t0, t1);
        gbar[k + 1] = p * gbar[k] +
                      0.5 * dt * (p * std::exp(theta0 * t0) + std::exp(theta0 * t1));
    }
    std::vector<double> j(n + 1, 0.0);
    for (std::size_t k = tau_node; k < n; ++k)
        j[k + 1] = j[k] + 0.5 * dt * q * (gbar[k] * gbar[k] + gbar[k + 1] * gbar[k + 1]);
    return j;
}

OneStepTraceIII one_step_iii(const ModelSpecIII& spec, const PathPair& path,
                             const Mme3Result& prelim, double tau, const TimeGrid& grid,
                             double fisher_floor) {
    const std::size_t tau_node = grid.index_of(tau);
    const std::size_t n = grid.steps;
    const double dt = grid.dt();
    auto dx = path.x_increments();

    OneStepTraceIII tr;
    tr.start = tau_node;
    tr.preliminary = prelim.value;
    tr.informative = prelim.informative;
    const std::size_t len = n - tau_node + 1;
    tr.value.assign(len, prelim.value);
    tr.fisher.assign(len, 0.0);
    if (!prelim.informative) return tr;

    auto mf = filter_sensitivity_iii(spec, prelim.value, dx, tau, grid);
    const double w = spec.f / (spec.sigma * spec.sigma);
    double score = 0.0;
    for (std::size_t k = tau_node; k <= n; ++k) {
        if (k > tau_node) {
            std::size_t j = k - 1;
            score += w * mf.mdot[j] * (dx[j] - spec.f * mf.m[j] * dt);
        }
        tr.fisher[k - tau_node] = mf.fisher_emp[k];
        if (mf.fisher_emp[k] > fisher_floor)
            tr.value[k - tau_node] = spec.theta.clamp(prelim.value + score / mf.fisher_emp[k]);
    }
    return tr;
}

}  // namespace akf
