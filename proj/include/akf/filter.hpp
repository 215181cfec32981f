#pragma once

#include <span>
#include <vector>

#include "akf/riccati.hpp"
#include "akf/sde.hpp"

namespace akf {

// Conditional-mean recursion in effective-drift form,
//   dm = A(t) m dt + (f gamma / sigma^2) dX,
// discretized with the exact one-step factor for the A part and left-endpoint
// loading for the dX part. m is assembled as init * phi0 + h, where h carries
// the observation-driven part; the split is exact at the discrete level.
struct FilterTrace {
    std::vector<double> m;
    std::vector<double> phi0;
    std::vector<double> h;
};

// Observation-driven part only (h and phi0); shared by the filter at any
// initial value and by the estimators, which never need the hidden path.
struct ObservationPart {
    std::vector<double> phi0;
    std::vector<double> h;
    std::vector<double> gain;  // B(t) = f gamma / sigma^2 at nodes
};

ObservationPart observation_part(const RiccatiTrace& ric, const CoefficientGrid& cg,
                                 std::span<const double> dx);

FilterTrace kb_filter(const RiccatiTrace& ric, const CoefficientGrid& cg, double init,
                      std::span<const double> dx);

FilterTrace kb_filter(const ModelSpecI& spec, double theta, const PathPair& path,
                      const RiccatiTrace& ric);
FilterTrace kb_filter(const ModelSpecII& spec, double theta1, double theta2,
                      const PathPair& path, const RiccatiTrace& ric);

// Integrated main term of the conditional mean over a short window [0, tau]
// for the constant-coefficient random-start model: the noiseless part of m at
// tau when the data come from (theta0, y0). Up to O(eps^2) it collapses to
// y0 e^{theta0 tau}; computed by direct graded-mesh quadrature so the identity
// can be tested against that collapse.
double kb_main_term_smalltau(const ModelSpecIII& spec, double theta, double theta0,
                             double y0, double tau);

}  // namespace akf
