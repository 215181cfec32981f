#pragma once

#include <span>
#include <vector>

#include "akf/filter.hpp"
#include "akf/riccati.hpp"
#include "akf/sde.hpp"

namespace akf {

// Everything the initial-value estimators share for one model/grid pair:
// Riccati trace, information integral I^t = int f^2 phi0^2 / sigma^2, and the
// weight g = f phi0 / sigma. None of it depends on the parameter.
struct Model1Setup {
    TimeGrid grid;
    CoefficientGrid cg;
    RiccatiTrace ric;
    std::vector<double> fisher;   // I at nodes (cumulative trapezoid)
    std::vector<double> g;        // f phi0 / sigma at nodes

    static Model1Setup build(const ModelSpecI& spec, const TimeGrid& grid);
};

inline double fisher_info(const Model1Setup& s, std::size_t node) { return s.fisher[node]; }

// Normalized filter risk bound Phi(0,t)^2 / I^t; +inf when I^t is below floor.
double efficiency_bound(const Model1Setup& s, std::size_t node, double fisher_floor = 1e-12);

struct ScalarEstimate {
    double value = 0.0;
    bool informative = true;  // false when I^t sits below the floor
};

// Closed-form maximizer of the quadratic likelihood in the initial value,
//   (I^t)^-1 int_0^t (f phi0 / sigma^2) [dX - f h ds],
// clamped to the parameter interval.
ScalarEstimate mle_batch(const Model1Setup& s, const ObservationPart& obs,
                         std::span<const double> dx, std::size_t node,
                         const Interval& bounds, double fisher_floor = 1e-12);

// Same formula restricted to the learning interval [0, tau].
ScalarEstimate mle_preliminary(const Model1Setup& s, const ObservationPart& obs,
                               std::span<const double> dx, std::size_t tau_node,
                               const Interval& bounds, double fisher_floor = 1e-12);

struct EstimatorTraceScalar {
    std::size_t start = 0;             // node index of tau
    std::vector<double> value;         // estimate at nodes start..steps
    std::vector<double> fisher;        // I at the same nodes
    double at(std::size_t node) const { return value[node - start]; }
};

// Estimator process on [tau, T]: seeded with the preliminary estimate, then
// Euler steps of
//   d th = -(g^2 / I) th dt + (g / (I sigma)) [dX - f h dt].
// The batch formula is the oracle this recursion is tested against.
EstimatorTraceScalar mle_recurrent(const Model1Setup& s, const ObservationPart& obs,
                                   std::span<const double> dx, std::size_t tau_node,
                                   const Interval& bounds, double fisher_floor = 1e-12);

// Quadratic log-likelihood of the initial value given the observation part
// (additive constant dropped); used to confirm the maximizer.
double log_likelihood(const Model1Setup& s, const ObservationPart& obs,
                      std::span<const double> dx, double theta, double eps, std::size_t node);

}  // namespace akf
