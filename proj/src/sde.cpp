#include "akf/sde.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace akf {

namespace {

CoefficientGrid sample_grid(const std::function<double(double)>& f,
                            const std::function<double(double)>& sigma,
                            const std::function<double(double)>& a,
                            const std::function<double(double)>& b,
                            const TimeGrid& grid) {
    CoefficientGrid cg;
    cg.f.resize(grid.n_nodes());
    cg.sigma.resize(grid.n_nodes());
    cg.a.resize(grid.n_nodes());
    cg.b.resize(grid.n_nodes());
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
        double t = grid.node(k);
        cg.f[k] = f(t);
        cg.sigma[k] = sigma(t);
        cg.a[k] = a(t);
        cg.b[k] = b(t);
    }
    return cg;
}

PathPair euler_path(const CoefficientGrid& cg, const TimeGrid& grid, double eps, double y0,
                    NormalStream& wlane, NormalStream& vlane, std::uint64_t replicate) {
    double sup_a = 0.0;
    for (double v : cg.a) sup_a = std::max(sup_a, std::abs(v));
    const double dt = grid.dt();
    if (sup_a * dt >= 1.0)
        throw std::invalid_argument("simulate_pair: step too coarse for the hidden drift (|a| dt >= 1)");

    PathPair p;
    p.grid = grid;
    p.replicate = replicate;
    p.y0 = y0;
    p.x.assign(grid.n_nodes(), 0.0);
    p.y.assign(grid.n_nodes(), 0.0);
    p.dw.resize(grid.steps);
    p.dv.resize(grid.steps);
    p.y[0] = y0;
    const double sq = std::sqrt(dt);
    for (std::size_t k = 0; k < grid.steps; ++k) {
        p.dw[k] = sq * wlane.next();
        p.dv[k] = sq * vlane.next();
        p.x[k + 1] = p.x[k] + cg.f[k] * p.y[k] * dt + eps * cg.sigma[k] * p.dw[k];
        p.y[k + 1] = p.y[k] + cg.a[k] * p.y[k] * dt + eps * cg.b[k] * p.dv[k];
    }
    return p;
}

}  // namespace

CoefficientGrid CoefficientGrid::sample(const ModelSpecI& spec, const TimeGrid& grid) {
    return sample_grid([&](double t) { return spec.f(t); }, [&](double t) { return spec.sigma(t); },
                       [&](double t) { return spec.a(t); }, [&](double t) { return spec.b(t); }, grid);
}

CoefficientGrid CoefficientGrid::sample(const ModelSpecII& spec, double theta2, const TimeGrid& grid) {
    return sample_grid([&](double t) { return spec.f(t); }, [&](double t) { return spec.sigma(t); },
                       [&](double t) { return spec.drift.value(theta2, t); },
                       [&](double t) { return spec.b(t); }, grid);
}

CoefficientGrid CoefficientGrid::sample(const ModelSpecIII& spec, double theta, const TimeGrid& grid) {
    return sample_grid([&](double) { return spec.f; }, [&](double) { return spec.sigma; },
                       [&](double) { return theta; }, [&](double) { return spec.b; }, grid);
}

PathPair simulate_pair(const ModelSpecI& spec, const TimeGrid& grid,
                       const SeedPolicy& seeds, std::uint64_t replicate) {
    auto cg = CoefficientGrid::sample(spec, grid);
    auto w = seeds.stream(replicate, NoiseLane::observation);
    auto v = seeds.stream(replicate, NoiseLane::state);
    return euler_path(cg, grid, spec.eps, spec.theta_true, w, v, replicate);
}

PathPair simulate_pair(const ModelSpecII& spec, const TimeGrid& grid,
                       const SeedPolicy& seeds, std::uint64_t replicate) {
    auto cg = CoefficientGrid::sample(spec, spec.theta2_true, grid);
    auto w = seeds.stream(replicate, NoiseLane::observation);
    auto v = seeds.stream(replicate, NoiseLane::state);
    return euler_path(cg, grid, spec.eps, spec.theta1_true, w, v, replicate);
}

PathPair simulate_pair(const ModelSpecIII& spec, const TimeGrid& grid,
                       const SeedPolicy& seeds, std::uint64_t replicate,
                       std::optional<double> y0_override) {
    auto cg = CoefficientGrid::sample(spec, spec.theta_true, grid);
    double y0;
    if (y0_override) {
        y0 = *y0_override;
    } else {
        auto lane = seeds.stream(replicate, NoiseLane::initial);
        y0 = std::sqrt(spec.d2) * lane.next();
    }
    auto w = seeds.stream(replicate, NoiseLane::observation);
    auto v = seeds.stream(replicate, NoiseLane::state);
    return euler_path(cg, grid, spec.eps, y0, w, v, replicate);
}

double ito_sum(std::span<const double> integrand, std::span<const double> increments) {
    if (integrand.size() != increments.size() && integrand.size() != increments.size() + 1)
        throw std::invalid_argument("ito_sum: integrand/increment length mismatch");
    double acc = 0.0;
    for (std::size_t k = 0; k < increments.size(); ++k) acc += integrand[k] * increments[k];
    return acc;
}

}  // namespace akf
