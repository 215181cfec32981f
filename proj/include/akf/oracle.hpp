#pragma once

#include <span>
#include <vector>

#include "akf/grid.hpp"
#include "akf/sde.hpp"

namespace akf {

// Exact Gaussian conditioning on the Euler-discretized state-space model:
//   Y_{k+1} = (1 + a_k dt) Y_k + eps b_k sqrt(dt) xi_k
//   X_{k+1} - X_k = f_k Y_k dt + eps sigma_k sqrt(dt) eta_k
// mean[k], var[k] are the posterior moments of Y_k given increments up to
// node k, i.e. the discrete analogue of conditioning on the path so far.
// Used as the brute-force ground truth for the continuous-time filter.
struct DiscreteKalmanResult {
    std::vector<double> mean, var;
};

DiscreteKalmanResult discrete_kalman(const CoefficientGrid& cg, const TimeGrid& grid,
                                     double eps, double prior_mean, double prior_var,
                                     std::span<const double> x_increments);

}  // namespace akf
