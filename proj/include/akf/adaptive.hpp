#pragma once

#include <span>
#include <vector>

#include "akf/estim1.hpp"
#include "akf/estim2.hpp"
#include "akf/estim3.hpp"

namespace akf {

// Adaptive conditional-mean approximations: the filter equations with the
// causally computed estimator process substituted for the unknown parameter.
// Traces are functions of the observations and config only; the hidden path
// never enters.
struct AdaptiveTrace {
    std::size_t start = 0;          // first valid node
    std::vector<double> m;          // values at nodes start..steps
    std::vector<double> gamma;      // adaptive variance trace (two-parameter model only)
    double at(std::size_t node) const { return m[node - start]; }
};

// Initial-value model: m_adaptive = estimate(t) * phi0(t) + h(t) on [tau, T].
AdaptiveTrace adaptive_filter_i(const Model1Setup& setup, const ObservationPart& obs,
                                const EstimatorTraceScalar& est);

// Two-parameter model on [tau_star, T]: coupled mean/variance recursion driven
// by the one-step drift estimate. The variance restarts from a fresh solve on
// [0, tau_star] at the frozen estimate; the mean restarts from the pathwise
// (integration-by-parts) reconstruction, which needs X values but no
// stochastic integral.
AdaptiveTrace adaptive_filter_ii(const ModelSpecII& spec, const PathPair& path,
                                 const OneStepTrace2D& onestep, double tau_star,
                                 const TimeGrid& grid);

// Pathwise reconstruction of the filter mean at a node from X values:
//   m = th1 phi0(t) + B(t) X_t - int_0^t phi(s,t) [B'(s) - A(s) B(s)] X_s ds.
// Exposed for tests; the adaptive restart uses it.
double filter_mean_pathwise(const ModelSpecII& spec, double theta1, double theta2,
                            std::span<const double> x_nodes, std::size_t node,
                            const TimeGrid& grid);

// Random-start model on [tau, T]: the limit variance evaluated at the running
// estimate drives the mean recursion; the start value is the [0, tau] filter
// run at the preliminary estimate.
AdaptiveTrace adaptive_filter_iii(const ModelSpecIII& spec, const PathPair& path,
                                  const OneStepTraceIII& onestep, double tau,
                                  const TimeGrid& grid);

struct ErrorSummary {
    std::size_t start = 0;
    std::vector<double> trace;   // (adaptive - reference) / eps per node
    double sup = 0.0;            // sup |trace|
    double l2 = 0.0;             // L2 norm over the interval
    double terminal = 0.0;
};

// Normalized gap between an adaptive trace and a reference filter trace given
// on all nodes. Both must live on the same grid.
ErrorSummary error_process(const AdaptiveTrace& adaptive, std::span<const double> reference,
                           double eps, const TimeGrid& grid);

}  // namespace akf
