#include "akf/adaptive.hpp"

#include <cmath>
#include <stdexcept>

#include "akf/numerics.hpp"

namespace akf {

AdaptiveTrace adaptive_filter_i(const Model1Setup& setup, const ObservationPart& obs,
                                const EstimatorTraceScalar& est) {
    AdaptiveTrace tr;
    tr.start = est.start;
    const std::size_t n = setup.grid.steps;
    tr.m.resize(n - est.start + 1);
    for (std::size_t k = est.start; k <= n; ++k)
        tr.m[k - est.start] = est.at(k) * obs.phi0[k] + obs.h[k];
    return tr;
}

namespace {

// m = th1 phi0(t) + B(t) X_t - int_0^t phi(s,t) [B'(s) - A(s) B(s)] X_s ds
// with B = f gamma / sigma^2 and A the effective drift; B' by central
// differences on the grid. Pathwise: no stochastic integral, so it stays
// meaningful when the parameter itself was estimated from the same window.
double mean_pathwise(const RiccatiTrace& ric, const CoefficientGrid& cg, double theta1,
                     std::span<const double> x_nodes, std::size_t node, const TimeGrid& grid) {
    const double dt = grid.dt();
    std::vector<double> bgain(node + 1);
    for (std::size_t k = 0; k <= node; ++k)
        bgain[k] = cg.f[k] * ric.gamma[k] / (cg.sigma[k] * cg.sigma[k]);
    auto bprime = [&](std::size_t k) {
        if (k == 0) return (bgain[1] - bgain[0]) / dt;
        if (k == node) return (bgain[node] - bgain[node - 1]) / dt;
        return (bgain[k + 1] - bgain[k - 1]) / (2.0 * dt);
    };
    double acc = 0.0, prev = 0.0;
    for (std::size_t k = 0; k <= node; ++k) {
        double cur = ric.phi(k, node) * (bprime(k) - ric.drift_eff[k] * bgain[k]) * x_nodes[k];
        if (k > 0) acc += 0.5 * dt * (prev + cur);
        prev = cur;
    }
    return theta1 * ric.phi0(node) + bgain[node] * x_nodes[node] - acc;
}

}  // namespace

double filter_mean_pathwise(const ModelSpecII& spec, double theta1, double theta2,
                            std::span<const double> x_nodes, std::size_t node,
                            const TimeGrid& grid) {
    auto ric = solve_riccati(spec, theta2, grid);
    auto cg = CoefficientGrid::sample(spec, theta2, grid);
    return mean_pathwise(ric, cg, theta1, x_nodes, node, grid);
}

AdaptiveTrace adaptive_filter_ii(const ModelSpecII& spec, const PathPair& path,
                                 const OneStepTrace2D& onestep, double tau_star,
                                 const TimeGrid& grid) {
    const std::size_t start = grid.index_of(tau_star);
    if (start <= onestep.start)
        throw std::invalid_argument("adaptive_filter_ii: tau_star must exceed tau");
    const std::size_t n = grid.steps;
    const double dt = grid.dt();
    auto dx = path.x_increments();

    const double th1s = onestep.th1[start - onestep.start];
    const double th2s = onestep.th2[start - onestep.start];

    // restart values at tau_star, both computed at the frozen estimate
    auto ric = solve_riccati(spec, th2s, grid);
    auto cg = CoefficientGrid::sample(spec, th2s, grid);
    double gamma = ric.gamma[start];
    double m = mean_pathwise(ric, cg, th1s, path.x, start, grid);

    AdaptiveTrace tr;
    tr.start = start;
    tr.m.resize(n - start + 1);
    tr.gamma.resize(n - start + 1);
    tr.m[0] = m;
    tr.gamma[0] = gamma;
    for (std::size_t k = start; k < n; ++k) {
        const double t = grid.node(k);
        const double th2 = onestep.th2[k - onestep.start];
        const double f = spec.f(t), s = spec.sigma(t), b = spec.b(t);
        const double a = spec.drift.value(th2, t);
        const double gain = f * gamma / (s * s);
        const double m_next = m + a * m * dt + gain * (dx[k] - f * m * dt);
        gamma += (2.0 * a * gamma - f * f * gamma * gamma / (s * s) + b * b) * dt;
        m = m_next;
        tr.m[k + 1 - start] = m;
        tr.gamma[k + 1 - start] = gamma;
    }
    return tr;
}

AdaptiveTrace adaptive_filter_iii(const ModelSpecIII& spec, const PathPair& path,
                                  const OneStepTraceIII& onestep, double tau,
                                  const TimeGrid& grid) {
    if (!onestep.informative)
        throw std::runtime_error("adaptive_filter_iii: non-informative preliminary estimate");
    const std::size_t start = grid.index_of(tau);
    if (start != onestep.start)
        throw std::invalid_argument("adaptive_filter_iii: trace interval mismatch");
    const std::size_t n = grid.steps;
    const double dt = grid.dt();
    auto dx = path.x_increments();
    const double q = spec.f * spec.f / (spec.sigma * spec.sigma);

    // start value: the [0, tau] filter run at the preliminary estimate
    auto mf = filter_sensitivity_iii(spec, onestep.preliminary, dx, tau, grid);
    double m = mf.m[start];

    AdaptiveTrace tr;
    tr.start = start;
    tr.m.resize(n - start + 1);
    tr.m[0] = m;
    for (std::size_t k = start; k < n; ++k) {
        const double th = onestep.value[k - onestep.start];
        const double g = LimitRiccati{th, spec.f, spec.sigma, spec.b}.value(grid.node(k));
        m += (th - q * g) * m * dt + spec.f * g / (spec.sigma * spec.sigma) * dx[k];
        tr.m[k + 1 - start] = m;
    }
    return tr;
}

ErrorSummary error_process(const AdaptiveTrace& adaptive, std::span<const double> reference,
                           double eps, const TimeGrid& grid) {
    if (reference.size() != grid.n_nodes())
        throw std::invalid_argument("error_process: reference must cover all nodes");
    if (adaptive.start + adaptive.m.size() != grid.n_nodes())
        throw std::invalid_argument("error_process: trace interval mismatch");
    ErrorSummary es;
    es.start = adaptive.start;
    es.trace.resize(adaptive.m.size());
    for (std::size_t i = 0; i < adaptive.m.size(); ++i) {
        es.trace[i] = (adaptive.m[i] - reference[adaptive.start + i]) / eps;
        es.sup = std::max(es.sup, std::abs(es.trace[i]));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < es.trace.size(); ++i)
        acc += 0.5 * grid.dt() * (es.trace[i] * es.trace[i] + es.trace[i + 1] * es.trace[i + 1]);
    es.l2 = std::sqrt(acc);
    es.terminal = es.trace.back();
    return es;
}

}  // namespace akf
