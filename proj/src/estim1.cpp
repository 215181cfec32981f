#include "akf/estim1.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "akf/numerics.hpp"

namespace akf {

Model1Setup Model1Setup::build(const ModelSpecI& spec, const TimeGrid& grid) {
    Model1Setup s;
    s.grid = grid;
    s.cg = CoefficientGrid::sample(spec, grid);
    s.ric = solve_riccati(spec, grid, 0.0);
    s.g.resize(grid.n_nodes());
    std::vector<double> integrand(grid.n_nodes());
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
        double phi0 = s.ric.phi0(k);
        s.g[k] = s.cg.f[k] * phi0 / s.cg.sigma[k];
        integrand[k] = s.g[k] * s.g[k];
    }
    s.fisher = cumquad4(integrand, grid.dt());
    return s;
}

double efficiency_bound(const Model1Setup& s, std::size_t node, double fisher_floor) {
    double info = s.fisher[node];
    if (info <= fisher_floor) return std::numeric_limits<double>::infinity();
    double phi0 = s.ric.phi0(node);
    return phi0 * phi0 / info;
}

namespace {

// running numerator sum_{j<k} (f phi0 / sigma^2)_j (dX_j - f_j h_j dt)
double score_upto(const Model1Setup& s, const ObservationPart& obs,
                  std::span<const double> dx, std::size_t node) {
    const double dt = s.grid.dt();
    double acc = 0.0;
    for (std::size_t j = 0; j < node; ++j) {
        double w = s.cg.f[j] * obs.phi0[j] / (s.cg.sigma[j] * s.cg.sigma[j]);
        acc += w * (dx[j] - s.cg.f[j] * obs.h[j] * dt);
    }
    return acc;
}

}  // namespace

ScalarEstimate mle_batch(const Model1Setup& s, const ObservationPart& obs,
                         std::span<const double> dx, std::size_t node,
                         const Interval& bounds, double fisher_floor) {
    ScalarEstimate e;
    double info = s.fisher[node];
    if (info <= fisher_floor) {
        e.informative = false;
        e.value = bounds.clamp(0.0);
        return e;
    }
    e.value = bounds.clamp(score_upto(s, obs, dx, node) / info);
    return e;
}

ScalarEstimate mle_preliminary(const Model1Setup& s, const ObservationPart& obs,
                               std::span<const double> dx, std::size_t tau_node,
                               const Interval& bounds, double fisher_floor) {
    if (tau_node == 0) throw std::invalid_argument("mle_preliminary: tau must be a positive grid node");
    return mle_batch(s, obs, dx, tau_node, bounds, fisher_floor);
}

EstimatorTraceScalar mle_recurrent(const Model1Setup& s, const ObservationPart& obs,
                                   std::span<const double> dx, std::size_t tau_node,
                                   const Interval& bounds, double fisher_floor) {
    if (s.fisher[tau_node] <= fisher_floor)
        throw std::runtime_error("mle_recurrent: insufficient information at tau");

    EstimatorTraceScalar tr;
    tr.start = tau_node;
    const std::size_t n = s.grid.steps;
    tr.value.resize(n - tau_node + 1);
    tr.fisher.resize(n - tau_node + 1);

    ScalarEstimate seed = mle_preliminary(s, obs, dx, tau_node, bounds, fisher_floor);
    const double dt = s.grid.dt();
    double th = seed.value;
    tr.value[0] = th;
    tr.fisher[0] = s.fisher[tau_node];
    for (std::size_t k = tau_node; k < n; ++k) {
        double info = s.fisher[k];
        double gk = s.g[k];
        double drift = -(gk * gk / info) * th * dt;
        double load = gk / (info * s.cg.sigma[k]) * (dx[k] - s.cg.f[k] * obs.h[k] * dt);
        th += drift + load;
        tr.value[k + 1 - tau_node] = bounds.clamp(th);
        tr.fisher[k + 1 - tau_node] = s.fisher[k + 1];
    }
    return tr;
}

double log_likelihood(const Model1Setup& s, const ObservationPart& obs,
                      std::span<const double> dx, double theta, double eps, std::size_t node) {
    const double dt = s.grid.dt();
    double acc = 0.0;
    for (std::size_t j = 0; j < node; ++j) {
        double m = theta * obs.phi0[j] + obs.h[j];
        double w = s.cg.f[j] * m / (eps * eps * s.cg.sigma[j] * s.cg.sigma[j]);
        acc += w * dx[j] - 0.5 * w * s.cg.f[j] * m * dt;
    }
    return acc;
}

}  // namespace akf
