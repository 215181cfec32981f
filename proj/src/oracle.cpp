#include "akf/oracle.hpp"

#include <stdexcept>

namespace akf {

DiscreteKalmanResult discrete_kalman(const CoefficientGrid& cg, const TimeGrid& grid,
                                     double eps, double prior_mean, double prior_var,
                                     std::span<const double> x_increments) {
    if (x_increments.size() != grid.steps)
        throw std::invalid_argument("discrete_kalman: increment count does not match grid");
    if (prior_var < 0.0)
        throw std::runtime_error("discrete_kalman: negative prior variance");

    DiscreteKalmanResult out;
    out.mean.resize(grid.n_nodes());
    out.var.resize(grid.n_nodes());

    const double dt = grid.dt();
    double mu = prior_mean, p = prior_var;
    for (std::size_t k = 0; k < grid.steps; ++k) {
        out.mean[k] = mu;
        out.var[k] = p;
        // condition on the increment observed over step k, then push through
        // the state transition
        const double fd = cg.f[k] * dt;
        const double s = fd * fd * p + eps * eps * cg.sigma[k] * cg.sigma[k] * dt;
        if (!(s > 0.0))
            throw std::runtime_error("discrete_kalman: degenerate innovation variance");
        const double gain = p * fd / s;
        mu += gain * (x_increments[k] - fd * mu);
        p *= (1.0 - gain * fd);
        if (p < 0.0)
            throw std::runtime_error("discrete_kalman: negative posterior variance");
        const double tr = 1.0 + cg.a[k] * dt;
        mu *= tr;
        p = tr * tr * p + eps * eps * cg.b[k] * cg.b[k] * dt;
    }
    out.mean[grid.steps] = mu;
    out.var[grid.steps] = p;
    return out;
}

}  // namespace akf
