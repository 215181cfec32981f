#include "akf/model.hpp"

#include <cmath>

#include "akf/numerics.hpp"

namespace akf {

namespace {

constexpr double kZeroFloor = 1e-12;

// Scan on a 4x refinement of the caller's grid.
std::size_t scan_samples(const TimeGrid& grid) { return 4 * grid.steps; }

void check_separated(const Coefficient& c, const char* name, const TimeGrid& grid,
                     ValidationReport& rep) {
    double floor = c.abs_floor(grid.horizon, scan_samples(grid));
    double required = c.declared_floor.value_or(kZeroFloor);
    if (floor < required)
        rep.violations.push_back(std::string(name) + " not separated from 0");
    rep.verified[std::string(name) + "_floor"] = floor;
}

void check_bounded(const Coefficient& c, const char* name, const TimeGrid& grid,
                   ValidationReport& rep) {
    auto [lo, hi] = c.range(grid.horizon, scan_samples(grid));
    double bound = std::max(std::abs(lo), std::abs(hi));
    if (!std::isfinite(bound))
        rep.violations.push_back(std::string(name) + " unbounded on [0,T]");
    rep.verified[std::string(name) + "_bound"] = bound;
}

LimitSystem solve_limit(const std::function<double(double)>& f_eval,
                        const std::function<double(double)>& a_eval,
                        double y0, const TimeGrid& grid) {
    LimitSystem out;
    out.x.resize(grid.n_nodes());
    out.y.resize(grid.n_nodes());
    std::vector<double> state = {0.0, y0};
    rk4_integrate(
        0.0, grid.dt(), grid.steps, state,
        [&](double t, const std::vector<double>& s, std::vector<double>& d) {
            d[0] = f_eval(t) * s[1];
            d[1] = a_eval(t) * s[1];
        },
        [&](std::size_t k, const std::vector<double>& s) {
            out.x[k] = s[0];
            out.y[k] = s[1];
        });
    return out;
}

}  // namespace

ValidationReport validate_model(const ModelSpecI& spec, const TimeGrid& grid) {
    ValidationReport rep;
    check_separated(spec.f, "f", grid, rep);
    check_separated(spec.sigma, "sigma", grid, rep);
    check_bounded(spec.f, "f", grid, rep);
    check_bounded(spec.sigma, "sigma", grid, rep);
    check_bounded(spec.a, "a", grid, rep);
    check_bounded(spec.b, "b", grid, rep);
    if (!(spec.eps > 0.0) || spec.eps > 1.0)
        rep.violations.push_back("eps must lie in (0, 1]");
    if (!(spec.theta.lo < spec.theta.hi))
        rep.violations.push_back("parameter interval empty");
    return rep;
}

ValidationReport validate_model(const ModelSpecII& spec, const TimeGrid& grid) {
    ValidationReport rep;
    check_separated(spec.f, "f", grid, rep);
    check_separated(spec.sigma, "sigma", grid, rep);
    check_bounded(spec.f, "f", grid, rep);
    check_bounded(spec.sigma, "sigma", grid, rep);
    check_bounded(spec.b, "b", grid, rep);
    if (!(spec.eps > 0.0) || spec.eps > 1.0)
        rep.violations.push_back("eps must lie in (0, 1]");
    if (!(spec.theta1.lo > 0.0))
        rep.violations.push_back("alpha1 > 0 required");
    if (!(spec.theta1.lo < spec.theta1.hi) || !(spec.theta2.lo < spec.theta2.hi))
        rep.violations.push_back("parameter rectangle empty");
    // drift bounded over the closed parameter rectangle (corner scan suffices
    // for the linear-in-parameter family)
    double worst = 0.0;
    for (double p : {spec.theta2.lo, spec.theta2.hi})
        for (std::size_t k = 0; k <= scan_samples(grid); ++k) {
            double t = grid.horizon * static_cast<double>(k) / static_cast<double>(scan_samples(grid));
            worst = std::max(worst, std::abs(spec.drift.value(p, t)));
        }
    if (!std::isfinite(worst)) rep.violations.push_back("drift unbounded on parameter set");
    rep.verified["drift_bound"] = worst;
    return rep;
}

ValidationReport validate_model(const ModelSpecIII& spec, const TimeGrid& grid) {
    ValidationReport rep;
    (void)grid;
    if (!(spec.f > 0.0)) rep.violations.push_back("f must be positive");
    if (!(spec.sigma > 0.0)) rep.violations.push_back("sigma must be positive");
    if (!(spec.b > 0.0)) rep.violations.push_back("b must be positive");
    if (!(spec.d2 > 0.0)) rep.violations.push_back("d2 must be positive");
    if (!(spec.eps > 0.0) || spec.eps > 1.0)
        rep.violations.push_back("eps must lie in (0, 1]");
    if (!(spec.theta.lo > 0.0)) rep.violations.push_back("alpha > 0 required");
    if (!(spec.theta.lo < spec.theta.hi)) rep.violations.push_back("parameter interval empty");
    rep.verified["f"] = spec.f;
    rep.verified["sigma"] = spec.sigma;
    return rep;
}

LimitSystem limit_system(const ModelSpecI& spec, double theta0, const TimeGrid& grid) {
    return solve_limit([&](double t) { return spec.f(t); },
                       [&](double t) { return spec.a(t); }, theta0, grid);
}

LimitSystem limit_system(const ModelSpecII& spec, double theta1, double theta2,
                         const TimeGrid& grid) {
    return solve_limit([&](double t) { return spec.f(t); },
                       [&](double t) { return spec.drift.value(theta2, t); }, theta1, grid);
}

LimitSystem limit_system(const ModelSpecIII& spec, double theta0, double y0,
                         const TimeGrid& grid) {
    return solve_limit([&](double) { return spec.f; },
                       [&](double) { return theta0; }, y0, grid);
}

}  // namespace akf
