#include "akf/filter.hpp"

#include <cmath>
#include <stdexcept>

namespace akf {

ObservationPart observation_part(const RiccatiTrace& ric, const CoefficientGrid& cg,
                                 std::span<const double> dx) {
    const TimeGrid& grid = ric.grid;
    if (dx.size() != grid.steps)
        throw std::invalid_argument("observation_part: increments do not match grid");
    ObservationPart obs;
    obs.phi0.resize(grid.n_nodes());
    obs.h.assign(grid.n_nodes(), 0.0);
    obs.gain.resize(grid.n_nodes());
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
        obs.phi0[k] = ric.phi0(k);
        obs.gain[k] = cg.f[k] * ric.gamma[k] / (cg.sigma[k] * cg.sigma[k]);
    }
    for (std::size_t k = 0; k < grid.steps; ++k)
        obs.h[k + 1] = ric.step_factor(k) * obs.h[k] + obs.gain[k] * dx[k];
    return obs;
}

FilterTrace kb_filter(const RiccatiTrace& ric, const CoefficientGrid& cg, double init,
                      std::span<const double> dx) {
    ObservationPart obs = observation_part(ric, cg, dx);
    FilterTrace ft;
    ft.phi0 = std::move(obs.phi0);
    ft.h = std::move(obs.h);
    ft.m.resize(ft.h.size());
    for (std::size_t k = 0; k < ft.m.size(); ++k) ft.m[k] = init * ft.phi0[k] + ft.h[k];
    return ft;
}

FilterTrace kb_filter(const ModelSpecI& spec, double theta, const PathPair& path,
                      const RiccatiTrace& ric) {
    auto cg = CoefficientGrid::sample(spec, path.grid);
    auto dx = path.x_increments();
    return kb_filter(ric, cg, theta, dx);
}

FilterTrace kb_filter(const ModelSpecII& spec, double theta1, double theta2,
                      const PathPair& path, const RiccatiTrace& ric) {
    auto cg = CoefficientGrid::sample(spec, theta2, path.grid);
    auto dx = path.x_increments();
    return kb_filter(ric, cg, theta1, dx);
}

double kb_main_term_smalltau(const ModelSpecIII& spec, double theta, double theta0,
                             double y0, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("kb_main_term_smalltau: tau must be positive");
    ConstRiccati cr{theta, spec.f, spec.sigma, spec.b, spec.d2 / (spec.eps * spec.eps)};
    const double q = spec.f * spec.f / (spec.sigma * spec.sigma);
    const double g_tau = cr.integral(tau);
    // cubic-graded mesh: the variance decays from d^2/eps^2 in a layer of
    // width ~ eps^2, which a uniform mesh cannot afford to resolve
    const std::size_t m = 4096;
    auto node = [&](std::size_t j) {
        double u = static_cast<double>(j) / static_cast<double>(m);
        return tau * u * u * u;
    };
    auto integrand = [&](double s) {
        double phi = std::exp(theta * (tau - s) - q * (g_tau - cr.integral(s)));
        return phi * q * cr.value(s) * std::exp(theta0 * s);
    };
    double acc = 0.0;
    double prev_s = node(0), prev_v = integrand(prev_s);
    for (std::size_t j = 1; j <= m; ++j) {
        double s = node(j), v = integrand(s);
        acc += 0.5 * (s - prev_s) * (prev_v + v);
        prev_s = s;
        prev_v = v;
    }
    return y0 * acc;
}

}  // namespace akf
