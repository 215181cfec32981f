#include "akf/numerics.hpp"

namespace akf {

void rk4_integrate(double t0, double dt, std::size_t n_steps, std::vector<double>& state,
                   const std::function<void(double, const std::vector<double>&, std::vector<double>&)>& rhs,
                   const std::function<void(std::size_t, const std::vector<double>&)>& record) {
    const std::size_t dim = state.size();
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    if (record) record(0, state);
    for (std::size_t k = 0; k < n_steps; ++k) {
        double t = t0 + static_cast<double>(k) * dt;
        rhs(t, state, k1);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = state[i] + 0.5 * dt * k1[i];
        rhs(t + 0.5 * dt, tmp, k2);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = state[i] + 0.5 * dt * k2[i];
        rhs(t + 0.5 * dt, tmp, k3);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = state[i] + dt * k3[i];
        rhs(t + dt, tmp, k4);
        for (std::size_t i = 0; i < dim; ++i)
            state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (record) record(k + 1, state);
    }
}

GoldenResult golden_min(const std::function<double(double)>& f, double a, double b, double tol) {
    if (b < a) std::swap(a, b);
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    std::size_t evals = 2;
    while (b - a > tol && evals < 400) {
        if (f1 <= f2) {   // keep the left interval on ties
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        ++evals;
    }
    if (f1 <= f2) return {x1, f1, evals};
    return {x2, f2, evals};
}

}  // namespace akf
