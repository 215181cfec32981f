#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace akf {

// Cumulative trapezoid of node values on a uniform grid; out[0] = 0.
inline std::vector<double> cumtrapz(std::span<const double> y, double dt) {
    std::vector<double> out(y.size(), 0.0);
    for (std::size_t k = 1; k < y.size(); ++k)
        out[k] = out[k - 1] + 0.5 * dt * (y[k - 1] + y[k]);
    return out;
}

// Fourth-order cumulative quadrature (cubic Newton-Cotes per cell); exact on
// cubics. Needed where downstream identities are checked near rounding level.
inline std::vector<double> cumquad4(std::span<const double> y, double dt) {
    const std::size_t n = y.size();
    if (n < 4) return cumtrapz(y, dt);
    std::vector<double> out(n, 0.0);
    out[1] = dt / 24.0 * (9.0 * y[0] + 19.0 * y[1] - 5.0 * y[2] + y[3]);
    for (std::size_t k = 1; k + 2 < n; ++k)
        out[k + 1] = out[k] + dt / 24.0 * (-y[k - 1] + 13.0 * y[k] + 13.0 * y[k + 1] - y[k + 2]);
    out[n - 1] = out[n - 2] +
                 dt / 24.0 * (y[n - 4] - 5.0 * y[n - 3] + 19.0 * y[n - 2] + 9.0 * y[n - 1]);
    return out;
}

inline double trapz(std::span<const double> y, double dt, std::size_t i0, std::size_t i1) {
    double s = 0.0;
    for (std::size_t k = i0; k + 1 <= i1; ++k) s += 0.5 * dt * (y[k] + y[k + 1]);
    return s;
}

// Composite Simpson on a uniform grid slice [i0, i1]; falls back to a
// trapezoid cell when the interval count is odd.
inline double simpson(std::span<const double> y, double dt, std::size_t i0, std::size_t i1) {
    if (i1 <= i0) return 0.0;
    std::size_t n = i1 - i0;
    double s = 0.0;
    std::size_t k = i0;
    if (n % 2 == 1) {
        s += 0.5 * dt * (y[k] + y[k + 1]);
        ++k;
    }
    for (; k + 2 <= i1; k += 2)
        s += dt / 3.0 * (y[k] + 4.0 * y[k + 1] + y[k + 2]);
    return s;
}

// Classical RK4 over a uniform grid; rhs(t, state, deriv) fills deriv.
// Record receives (node_index, state) after every step, including the start.
void rk4_integrate(double t0, double dt, std::size_t n_steps, std::vector<double>& state,
                   const std::function<void(double, const std::vector<double>&, std::vector<double>&)>& rhs,
                   const std::function<void(std::size_t, const std::vector<double>&)>& record);

// Deterministic golden-section minimization on [a, b]. Tie-breaking and the
// bracketing order are fixed, so identical inputs give identical results.
struct GoldenResult { double x; double fx; std::size_t evals; };
GoldenResult golden_min(const std::function<double(double)>& f, double a, double b, double tol);

// Symmetric 2x2 matrix helpers (Fisher information blocks).
struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a22 = 0.0;

    double det() const { return a11 * a22 - a12 * a12; }
    double min_eig() const {
        double tr = a11 + a22;
        double d = std::sqrt(std::max(0.0, 0.25 * tr * tr - det()));
        return 0.5 * tr - d;
    }
    // Closed-form inverse; returns false when |det| is below the floor.
    bool inverse(Mat2& out, double det_floor = 1e-10) const {
        double d = det();
        if (!(std::abs(d) > det_floor)) return false;
        out.a11 = a22 / d;
        out.a22 = a11 / d;
        out.a12 = -a12 / d;
        return true;
    }
    void mul(double x1, double x2, double& y1, double& y2) const {
        y1 = a11 * x1 + a12 * x2;
        y2 = a12 * x1 + a22 * x2;
    }
};

}  // namespace akf
