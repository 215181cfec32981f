#pragma once

#include <map>
#include <string>
#include <vector>

#include "akf/coefficient.hpp"
#include "akf/grid.hpp"

namespace akf {

// Partially observed pair on [0, T]:
//   dX = f(t) Y dt + eps sigma(t) dW,   X_0 = 0
//   dY = a(t) Y dt + eps b(t) dV
// The three specs differ in what is unknown about Y_0 and the hidden drift.

// Unknown deterministic initial value Y_0 = theta.
struct ModelSpecI {
    Coefficient f, sigma, a, b;
    double eps = 0.1;
    Interval theta;        // open parameter interval
    double theta_true = 0.0;
};

// Unknown initial value theta1 and drift parameter theta2, a = a(theta2, t).
struct ModelSpecII {
    Coefficient f, sigma, b;
    ParametricDrift drift;
    double eps = 0.1;
    Interval theta1;       // requires theta1.lo > 0
    Interval theta2;
    double theta1_true = 1.0;
    double theta2_true = 0.0;
};

// Constant coefficients, random initial value Y_0 ~ N(0, d2).
struct ModelSpecIII {
    double f = 1.0, sigma = 1.0, b = 1.0, d2 = 1.0;
    double eps = 0.1;
    Interval theta;        // requires theta.lo > 0
    double theta_true = 1.0;
};

struct ValidationReport {
    std::vector<std::string> violations;
    std::map<std::string, double> verified;  // floors and bounds found by the scan
    bool ok() const { return violations.empty(); }
};

// Regularity checks. Coefficient positivity/floors are scanned on a 4x
// refinement of the caller's grid rather than proven symbolically, since
// coefficients may be user-supplied tables.
ValidationReport validate_model(const ModelSpecI& spec, const TimeGrid& grid);
ValidationReport validate_model(const ModelSpecII& spec, const TimeGrid& grid);
ValidationReport validate_model(const ModelSpecIII& spec, const TimeGrid& grid);

// Noise-free trajectories x' = f y, y' = a y on the grid (4th order).
struct LimitSystem {
    std::vector<double> x, y;
};

LimitSystem limit_system(const ModelSpecI& spec, double theta0, const TimeGrid& grid);
LimitSystem limit_system(const ModelSpecII& spec, double theta1, double theta2, const TimeGrid& grid);
LimitSystem limit_system(const ModelSpecIII& spec, double theta0, double y0, const TimeGrid& grid);

}  // namespace akf
