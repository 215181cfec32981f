#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "akf/grid.hpp"
#include "akf/model.hpp"
#include "akf/rng.hpp"

namespace akf {

// Coefficients sampled at the grid nodes; the form all filters consume.
struct CoefficientGrid {
    std::vector<double> f, sigma, a, b;

    static CoefficientGrid sample(const ModelSpecI& spec, const TimeGrid& grid);
    static CoefficientGrid sample(const ModelSpecII& spec, double theta2, const TimeGrid& grid);
    static CoefficientGrid sample(const ModelSpecIII& spec, double theta, const TimeGrid& grid);
};

struct PathPair {
    TimeGrid grid;
    std::vector<double> x, y;   // node values, x[0] = 0
    std::vector<double> dw, dv; // Wiener increments per step
    std::uint64_t replicate = 0;
    double y0 = 0.0;            // realized initial hidden value

    std::vector<double> x_increments() const {
        std::vector<double> dx(grid.steps);
        for (std::size_t k = 0; k < grid.steps; ++k) dx[k] = x[k + 1] - x[k];
        return dx;
    }
};

// Euler-Maruyama simulation. Per-step noise is stored so the verification
// suite can re-integrate other integrands against the same randomness.
PathPair simulate_pair(const ModelSpecI& spec, const TimeGrid& grid,
                       const SeedPolicy& seeds, std::uint64_t replicate);
PathPair simulate_pair(const ModelSpecII& spec, const TimeGrid& grid,
                       const SeedPolicy& seeds, std::uint64_t replicate);
// Model III draws y0 ~ N(0, d2) from its own lane unless an explicit value is
// supplied; overriding it leaves the W and V draws unchanged.
PathPair simulate_pair(const ModelSpecIII& spec, const TimeGrid& grid,
                       const SeedPolicy& seeds, std::uint64_t replicate,
                       std::optional<double> y0_override = std::nullopt);

// Left-endpoint Ito sum: sum_k h(t_k) * (X_{k+1} - X_k). The integrand may be
// given on nodes (one longer than the increments) or aligned with them.
double ito_sum(std::span<const double> integrand, std::span<const double> increments);

}  // namespace akf
