#pragma once

#include <span>
#include <vector>

#include "akf/model.hpp"
#include "akf/riccati.hpp"
#include "akf/sde.hpp"

namespace akf {

// Forward-difference estimate of X' over the window eps^(2/3), rounded to the
// grid. Throws when the window does not fit.
double derivative_estimate(std::span<const double> x_nodes, const TimeGrid& grid,
                           double t, double eps);

struct Mme3Result {
    double value = 0.0;
    bool informative = true;  // false when both derivative estimates sit under the floor
};

// Log-ratio moment estimator (ln|X'(t2)| - ln|X'(t1)|) / (t2 - t1), clamped to
// the parameter interval. |X'| is floored before the logs; paths with both
// derivatives under the floor carry no information about the exponent (the
// near-zero initial value regime) and are flagged instead of returning NaN.
Mme3Result mme_log_ratio(std::span<const double> x_nodes, const TimeGrid& grid,
                         double t1, double t2, double eps, const Interval& bounds,
                         double floor = 1e-12);

// Same estimator at the shrinking evaluation points t_i = p_i / ln(1/eps).
Mme3Result mme_shrinking_window(std::span<const double> x_nodes, const TimeGrid& grid,
                                double p1, double p2, double eps, const Interval& bounds,
                                double floor = 1e-12);

// Filter and its parameter derivative for the random-start model. On [0, tau]
// the exact constant-coefficient variance (started from d^2/eps^2) drives an
// integrating-factor scheme that steps over the initial boundary layer; on
// [tau, T] the small-noise limit variance is used. mdot is the exact
// algorithmic derivative of the whole computation and is valid from tau on.
// Everything here is a functional of the observations only.
struct Model3Filter {
    std::size_t tau_node = 0;
    std::vector<double> m;           // all nodes
    std::vector<double> mdot;        // all nodes; derivative of m through both phases
    std::vector<double> fisher_emp;  // (f^2/sigma^2) int_tau^t mdot^2, zero before tau
};
Model3Filter filter_sensitivity_iii(const ModelSpecIII& spec, double theta,
                                    std::span<const double> dx, double tau,
                                    const TimeGrid& grid);

inline double empirical_fisher_iii(const Model3Filter& mf, std::size_t node) {
    return mf.fisher_emp[node];
}

// Deterministic limit of the empirical information per unit y0^2:
//   J_tau^t = (f^2/sigma^2) int_tau^t Gbar(s)^2 ds,
// where Gbar solves g' = [theta0 - f^2 gamma_lim/sigma^2] g + e^{theta0 t}
// from 0. Independent of the path; the empirical information divided by y0^2
// clusters around it.
std::vector<double> j_limit_trace(const ModelSpecIII& spec, double theta0, double tau,
                                  const TimeGrid& grid);

struct OneStepTraceIII {
    std::size_t start = 0;            // tau node
    std::vector<double> value;        // estimate at nodes start..steps
    std::vector<double> fisher;       // empirical information at the same nodes
    double preliminary = 0.0;
    bool informative = true;
};

// Scoring correction of the log-ratio estimate, as a process on (tau, T]:
//   th(t) = th* + I(t)^-1 (f/sigma^2) int_tau^t mdot [dX - f m ds].
// Nodes with information under the floor keep the preliminary value. The
// non-informative flag of the preliminary propagates.
OneStepTraceIII one_step_iii(const ModelSpecIII& spec, const PathPair& path,
                             const Mme3Result& prelim, double tau, const TimeGrid& grid,
                             double fisher_floor = 1e-12);

}  // namespace akf
