#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace akf {

// Uniform discretization of [0, T]. Node k sits at k * dt, with dt = T / steps.
struct TimeGrid {
    double horizon = 1.0;
    std::size_t steps = 0;

    TimeGrid() = default;
    TimeGrid(double T, std::size_t n) : horizon(T), steps(n) {
        if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
        if (n < 2) throw std::invalid_argument("TimeGrid: need at least 2 steps");
    }

    double dt() const { return horizon / static_cast<double>(steps); }
    std::size_t n_nodes() const { return steps + 1; }
    double node(std::size_t k) const { return static_cast<double>(k) * dt(); }

    // Nearest node index; throws when t is off-grid by more than a quarter step.
    std::size_t index_of(double t) const {
        double x = t / dt();
        double r = std::round(x);
        if (std::abs(x - r) > 0.25 || r < 0.0 || r > static_cast<double>(steps))
            throw std::invalid_argument("TimeGrid: time not on grid");
        return static_cast<std::size_t>(r);
    }

    // First node at or after t (clamped to the grid).
    std::size_t ceil_index(double t) const {
        if (t <= 0.0) return 0;
        double x = std::ceil(t / dt() - 1e-9);
        if (x > static_cast<double>(steps)) throw std::invalid_argument("TimeGrid: time beyond horizon");
        return static_cast<std::size_t>(x);
    }

    bool operator==(const TimeGrid& o) const { return horizon == o.horizon && steps == o.steps; }
};

// Open parameter interval with interior clamping for estimator outputs.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    bool contains(double x) const { return x > lo && x < hi; }
    double width() const { return hi - lo; }
    // Estimates may leave the open set at finite noise; they are pinned just
    // inside the closure.
    double clamp(double x) const {
        double a = lo + 1e-9, b = hi - 1e-9;
        return x < a ? a : (x > b ? b : x);
    }
};

}  // namespace akf
