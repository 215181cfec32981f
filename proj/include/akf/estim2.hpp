#pragma once

#include <span>
#include <vector>

#include "akf/filter.hpp"
#include "akf/numerics.hpp"
#include "akf/riccati.hpp"
#include "akf/sde.hpp"

namespace akf {

// --- preliminary stage -------------------------------------------------

// Short-window moment estimator of the initial value: X at the window end
// divided by f(0) times the window length; window eps^(2/3) rounded up to the
// grid. Throws when the grid cannot resolve the window.
struct Mme1Result {
    double value = 0.0;
    double window = 0.0;     // realized (grid-rounded) window
};
Mme1Result mme_theta1(std::span<const double> x_nodes, const ModelSpecII& spec,
                      const TimeGrid& grid, double eps);

// F(p, t) = int_0^t f(s) exp(int_0^s a(p, v) dv) ds, the noiseless observation
// curve per unit initial value.
double curve_F(const ModelSpecII& spec, double theta2, double t, std::size_t quad_steps = 2048);
// F on grid nodes 0..upto (cumulative, one pass).
std::vector<double> curve_F_grid(const ModelSpecII& spec, double theta2,
                                 const TimeGrid& grid, std::size_t upto);

// inf over |p - p0| >= nu (within the closed parameter set) of the L2[0,tau]
// distance between F(p,.) and F(p0,.); positive value certifies the
// minimum-distance stage. Grid scan at 1e-3 of the parameter width.
double identifiability_g(const ModelSpecII& spec, double theta20, double nu, double tau,
                         const TimeGrid& grid);

struct MdeResult {
    double value = 0.0;
    bool identifiable = true;  // false when the objective is flat on the scan
};

// Path-independent part of the minimum-distance scan: the candidate grid and
// its observation curves. Building it once and sharing it across replicates
// is what keeps batch runs affordable.
struct MdeContext {
    std::size_t tau_node = 0;
    std::vector<double> candidates;
    std::vector<std::vector<double>> curves;  // F per candidate on nodes 0..tau_node
    static MdeContext build(const ModelSpecII& spec, double tau, const TimeGrid& grid);
};

// Minimum-distance estimate of the drift parameter on [0, tau] with the
// moment estimate of the initial value plugged in. Deterministic coarse scan
// (256 points) followed by golden-section refinement; ties break toward the
// smaller parameter.
MdeResult mde_theta2(std::span<const double> x_nodes, double theta1_star,
                     const ModelSpecII& spec, double tau, const TimeGrid& grid);
MdeResult mde_theta2(std::span<const double> x_nodes, double theta1_star,
                     const ModelSpecII& spec, const MdeContext& ctx, const TimeGrid& grid);

struct PreliminaryPair {
    double theta1 = 0.0, theta2 = 0.0;
    double tau_eps = 0.0;   // moment-estimator window
    double tau = 0.0;       // distance-estimator window
    bool identifiable = true;
};
PreliminaryPair preliminary_pair(std::span<const double> x_nodes, const ModelSpecII& spec,
                                 double tau, const TimeGrid& grid, double eps);

// --- sensitivities ------------------------------------------------------

// Filter and its parameter derivatives along one path. mdot1 equals the
// transition factor from 0 (same array); mdot2 is the exact algorithmic
// derivative of the filter recursion, driven by the variational Riccati
// solution.
struct Model2Filter {
    RiccatiTrace ric;        // with parameter derivative
    FilterTrace ft;
    std::vector<double> mdot1, mdot2;
};
Model2Filter filter_sensitivities(const ModelSpecII& spec, double theta1, double theta2,
                                  std::span<const double> dx, const TimeGrid& grid);

// Deterministic (eps = 0) counterparts: the filter limit y(theta, theta0, t),
// the data limit y(theta0, t), and the two parameter sensitivities.
struct LimitSensitivities {
    std::vector<double> y_data;   // hidden limit path under theta0
    std::vector<double> y_plug;   // filter limit run at theta on theta0-data
    std::vector<double> ydot1;    // = phi0(theta2, .)
    std::vector<double> ydot2;
};
LimitSensitivities limit_sensitivities(const ModelSpecII& spec,
                                       double theta1, double theta2,
                                       double theta01, double theta02,
                                       const TimeGrid& grid);

// Fisher 2x2 blocks I_tau^t at every node (zero before tau), built from the
// limit sensitivities evaluated with the same parameter plugged into both
// slots.
struct FisherTrace {
    std::size_t tau_node = 0;
    std::vector<Mat2> mat;   // per node
};
FisherTrace fisher_matrix(const ModelSpecII& spec, double theta1, double theta2,
                          std::size_t tau_node, const TimeGrid& grid);

// --- one-step correction ------------------------------------------------

// Single scoring correction of the preliminary pair, computed three ways:
//  * integral form with filter sensitivities (primary output),
//  * integral form with limit sensitivities,
//  * Euler recursion equivalent to the limit-sensitivity integral form.
// All values clamped to the parameter rectangle; nodes where the Fisher block
// is not invertible keep the preliminary value.
struct OneStepTrace2D {
    std::size_t start = 0;       // tau node
    std::vector<double> th1, th2;              // primary (filter sensitivities)
    std::vector<double> th1_lim, th2_lim;      // limit-sensitivity integral form
    std::vector<double> th1_rec, th2_rec;      // recurrent form
    std::size_t rec_seed = 0;    // node where the recurrent form starts stepping
    FisherTrace fisher;
    bool degenerate = false;     // Fisher never became invertible on (tau, T]
};
OneStepTrace2D one_step_process(const ModelSpecII& spec, const PathPair& path,
                                const PreliminaryPair& prelim, double tau,
                                const TimeGrid& grid, double det_floor = 1e-10);

}  // namespace akf
