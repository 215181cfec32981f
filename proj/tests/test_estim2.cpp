#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "akf/estim2.hpp"
#include "akf/stats.hpp"

using namespace akf;

namespace {

// constant drift a = theta2
ModelSpecII const_drift_spec(double eps) {
    ModelSpecII s;
    s.f = Coefficient::constant(1.0);
    s.sigma = Coefficient::constant(1.0);
    s.b = Coefficient::constant(1.0);
    s.drift.g = Coefficient::constant(1.0);
    s.drift.h = Coefficient::constant(0.0);
    s.eps = eps;
    s.theta1 = Interval{0.2, 3.0};
    s.theta2 = Interval{0.1, 1.0};
    s.theta1_true = 1.0;
    s.theta2_true = 0.5;
    return s;
}

// drift independent of the parameter: a = 0.3
ModelSpecII flat_drift_spec(double eps) {
    ModelSpecII s = const_drift_spec(eps);
    s.drift.g = Coefficient::constant(0.0);
    s.drift.h = Coefficient::constant(0.3);
    return s;
}

// time-ramped drift a = theta2 t: well identified on a long window, with the
// leading short-window bias of the moment stage suppressed
ModelSpecII ramp_drift_spec(double eps) {
    ModelSpecII s;
    s.f = Coefficient::constant(1.0);
    s.sigma = Coefficient::constant(0.015);
    s.b = Coefficient::constant(0.0075);
    s.drift.g = Coefficient::polynomial({0.0, 1.0});
    s.drift.h = Coefficient::constant(0.0);
    s.eps = eps;
    s.theta1 = Interval{0.2, 3.0};
    s.theta2 = Interval{0.05, 1.2};
    s.theta1_true = 1.0;
    s.theta2_true = 0.25;
    return s;
}

}  // namespace

TEST_CASE("short-window moment estimator of the initial value") {
    TimeGrid grid(1.0, 1 << 13);
    auto spec = const_drift_spec(0.05);
    SeedPolicy seeds{1};

    // noiseless data reproduce the deterministic window average
    auto clean = spec;
    clean.eps = 1e-300;
    auto p = simulate_pair(clean, grid, seeds, 0);
    auto est = mme_theta1(p.x, clean, grid, 0.05);
    const double th2 = clean.theta2_true, tau = est.window;
    double expected = clean.theta1_true * (std::exp(th2 * tau) - 1.0) / (th2 * tau);
    CHECK(est.value == doctest::Approx(expected).epsilon(1e-4));
    CHECK(std::abs(est.value - clean.theta1_true) < 0.1);  // O(window) bias only

    // an identically zero path clamps to the interior floor of the parameter set
    std::vector<double> zero(grid.n_nodes(), 0.0);
    auto ez = mme_theta1(zero, spec, grid, 0.05);
    CHECK(ez.value == doctest::Approx(spec.theta1.lo + 1e-9));

    // window below two grid steps is refused
    TimeGrid coarse(1.0, 8);
    CHECK_THROWS(mme_theta1(p.x, spec, coarse, 1e-4));
}

TEST_CASE("observation curve per unit initial value") {
    auto spec = const_drift_spec(0.1);
    CHECK(curve_F(spec, 0.5, 1.0) == doctest::Approx(2.0 * (std::exp(0.5) - 1.0)).epsilon(1e-7));
    CHECK(curve_F(spec, 0.5, 1.0) == doctest::Approx(1.2974).epsilon(1e-4));
    // parameter at zero is a removable case: the curve degrades to t
    CHECK(curve_F(spec, 0.0, 0.7) == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(curve_F(spec, 0.5, 0.0) == 0.0);

    // grid version agrees with the scalar quadrature
    TimeGrid grid(1.0, 4096);
    auto fg = curve_F_grid(spec, 0.5, grid, grid.steps);
    CHECK(fg.back() == doctest::Approx(curve_F(spec, 0.5, 1.0)).epsilon(1e-6));
}

TEST_CASE("identifiability functional") {
    TimeGrid grid(1.0, 4096);
    auto spec = const_drift_spec(0.1);

    double g = identifiability_g(spec, 0.5, 0.1, 1.0, grid);
    CHECK(g > 0.0);
    // the scan infimum is attained at the closest feasible parameters
    auto l2 = [&](double p, double p0) {
        auto fp = curve_F_grid(spec, p, grid, grid.steps);
        auto f0 = curve_F_grid(spec, p0, grid, grid.steps);
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 <= grid.steps; ++k) {
            double d0 = fp[k] - f0[k], d1 = fp[k + 1] - f0[k + 1];
            acc += 0.5 * grid.dt() * (d0 * d0 + d1 * d1);
        }
        return acc;
    };
    CHECK(g == doctest::Approx(std::min(l2(0.4, 0.5), l2(0.6, 0.5))).epsilon(1e-9));

    // feasible set reduced to one endpoint
    double ge = identifiability_g(spec, 0.1, 0.9, 1.0, grid);
    CHECK(ge == doctest::Approx(l2(1.0, 0.1)).epsilon(1e-6));

    // empty feasible set cannot certify anything
    CHECK(identifiability_g(spec, 0.5, 5.0, 1.0, grid) == 0.0);
}

TEST_CASE("minimum-distance estimate of the drift parameter") {
    TimeGrid grid(1.0, 1 << 13);
    auto spec = const_drift_spec(1e-300);
    SeedPolicy seeds{2};
    auto p = simulate_pair(spec, grid, seeds, 0);

    auto res = mde_theta2(p.x, spec.theta1_true, spec, 1.0, grid);
    CHECK(res.identifiable);
    CHECK(res.value == doctest::Approx(spec.theta2_true).epsilon(2e-3));

    // flat objective flags the path as carrying no drift information
    std::vector<double> zero(grid.n_nodes(), 0.0);
    auto flat = mde_theta2(zero, 0.0, spec, 1.0, grid);
    CHECK_FALSE(flat.identifiable);

    // the combined preliminary pair demands the moment window inside [0, tau]
    CHECK_THROWS(preliminary_pair(p.x, spec, 0.05, grid, 0.5));
}

TEST_CASE("filter sensitivities: exact identities and degenerate drift") {
    TimeGrid grid(1.0, 1 << 12);
    auto spec = const_drift_spec(0.1);
    SeedPolicy seeds{3};
    auto p = simulate_pair(spec, grid, seeds, 0);
    auto dx = p.x_increments();

    auto mf = filter_sensitivities(spec, 1.0, 0.5, dx, grid);
    // the initial-value sensitivity is the transition factor, same array
    for (std::size_t k = 0; k < grid.n_nodes(); k += 256)
        CHECK(std::abs(mf.mdot1[k] - mf.ric.phi0(k)) <= 1e-12);

    // drift that ignores the parameter: variational solve and sensitivity vanish
    auto flat = flat_drift_spec(0.1);
    auto pf = simulate_pair(flat, grid, seeds, 1);
    auto mff = filter_sensitivities(flat, 1.0, 0.5, pf.x_increments(), grid);
    for (std::size_t k = 0; k < grid.n_nodes(); k += 256) {
        CHECK(mff.ric.gamma_dp[k] == 0.0);
        CHECK(mff.mdot2[k] == 0.0);
    }

    // central-difference oracle on the filter
    const double h = 1e-4;
    auto lo = filter_sensitivities(spec, 1.0, 0.5 - h, dx, grid);
    auto hi = filter_sensitivities(spec, 1.0, 0.5 + h, dx, grid);
    double sup = 0.0;
    for (std::size_t k = 0; k < grid.n_nodes(); ++k)
        sup = std::max(sup, std::abs(mf.mdot2[k] - (hi.ft.m[k] - lo.ft.m[k]) / (2.0 * h)));
    CHECK(sup <= 1e-5);
}

TEST_CASE("limit sensitivities match the small-noise filter sensitivities") {
    TimeGrid grid(1.0, 1 << 13);
    auto spec = const_drift_spec(1e-3);
    SeedPolicy seeds{4};
    auto p = simulate_pair(spec, grid, seeds, 0);
    auto ls = limit_sensitivities(spec, 1.0, 0.5, 1.0, 0.5, grid);
    auto mf = filter_sensitivities(spec, 1.0, 0.5, p.x_increments(), grid);

    for (std::size_t k = 0; k < grid.n_nodes(); k += 512)
        CHECK(ls.ydot1[k] == doctest::Approx(mf.mdot1[k]).epsilon(1e-12));

    double sup = 0.0;
    for (std::size_t k = grid.index_of(0.25); k < grid.n_nodes(); ++k)
        sup = std::max(sup, std::abs(ls.ydot2[k] - mf.mdot2[k]));
    CHECK(sup <= 1e-2);

    // parameter-independent drift kills the second component
    auto flat = flat_drift_spec(0.1);
    auto lsf = limit_sensitivities(flat, 1.0, 0.5, 1.0, 0.5, grid);
    for (std::size_t k = 0; k < grid.n_nodes(); k += 512) CHECK(lsf.ydot2[k] == 0.0);
}

TEST_CASE("information matrix structure") {
    TimeGrid grid(1.0, 1 << 12);
    auto spec = const_drift_spec(0.1);
    std::size_t tau_node = grid.index_of(0.25);
    auto ft = fisher_matrix(spec, 1.0, 0.5, tau_node, grid);

    // empty integral at tau
    CHECK(ft.mat[tau_node].a11 == 0.0);
    CHECK(ft.mat[tau_node].a22 == 0.0);

    // strictly positive definite past tau, Cauchy-Schwarz along the way
    NormalStream pick(99, 0, NoiseLane::initial);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t k = tau_node + 1 +
                        static_cast<std::size_t>(pick.uniform01() *
                                                 static_cast<double>(grid.steps - tau_node - 1));
        const Mat2& m = ft.mat[k];
        CHECK(m.a12 * m.a12 <= m.a11 * m.a22 * (1.0 + 1e-12));
    }
    CHECK(ft.mat[grid.steps].min_eig() > 0.0);

    // rank deficiency when the drift ignores the parameter
    auto flat = flat_drift_spec(0.1);
    auto ftf = fisher_matrix(flat, 1.0, 0.5, tau_node, grid);
    CHECK(ftf.mat[grid.steps].a22 == 0.0);
    CHECK(ftf.mat[grid.steps].a12 == 0.0);
    CHECK(ftf.mat[grid.steps].a11 > 0.0);
    Mat2 inv;
    CHECK_FALSE(ftf.mat[grid.steps].inverse(inv));  // degeneracy flagged
}

TEST_CASE("one-step correction: fixed point and route agreement") {
    const double tau = 0.25;

    // noiseless data with the true pair plugged in stays at the truth
    {
        TimeGrid grid(1.0, 1 << 13);
        auto clean = const_drift_spec(1e-300);
        SeedPolicy seeds{5};
        auto p = simulate_pair(clean, grid, seeds, 0);
        PreliminaryPair prelim{clean.theta1_true, clean.theta2_true, 0.05, tau, true};
        auto os = one_step_process(clean, p, prelim, tau, grid);
        CHECK(std::abs(os.th1.back() - clean.theta1_true) <= 1e-3);
        CHECK(std::abs(os.th2.back() - clean.theta2_true) <= 1e-3);
        double sup1 = 0.0, sup2 = 0.0;
        for (std::size_t i = os.th1.size() / 4; i < os.th1.size(); ++i) {
            sup1 = std::max(sup1, std::abs(os.th1[i] - clean.theta1_true));
            sup2 = std::max(sup2, std::abs(os.th2[i] - clean.theta2_true));
        }
        CHECK(sup1 <= 1e-2);
        CHECK(sup2 <= 1e-2);
    }

    // integral form drives the recurrent form at Euler order
    {
        TimeGrid grid(2.0, 1 << 16);
        auto spec = ramp_drift_spec(0.01);
        const double tau2 = grid.node(grid.ceil_index(1.3));
        auto mde_ctx = MdeContext::build(spec, tau2, grid);
        SeedPolicy seeds{6};
        auto p = simulate_pair(spec, grid, seeds, 0);
        auto m1 = mme_theta1(p.x, spec, grid, spec.eps);
        auto m2 = mde_theta2(p.x, m1.value, spec, mde_ctx, grid);
        PreliminaryPair prelim{m1.value, m2.value, m1.window, tau2, m2.identifiable};
        auto os = one_step_process(spec, p, prelim, tau2, grid);
        REQUIRE(os.rec_seed > os.start);
        double sup = 0.0;
        for (std::size_t i = os.rec_seed - os.start; i < os.th1_lim.size(); ++i) {
            sup = std::max(sup, std::abs(os.th1_rec[i] - os.th1_lim[i]));
            sup = std::max(sup, std::abs(os.th2_rec[i] - os.th2_lim[i]));
        }
        CHECK(sup <= 1e-3);
    }

    // filter-based and limit-based corrections differ by o(eps) at the horizon
    {
        TimeGrid grid(2.0, 1 << 13);
        auto spec = ramp_drift_spec(0.01);
        const double tau2 = grid.node(grid.ceil_index(1.3));
        auto mde_ctx = MdeContext::build(spec, tau2, grid);
        SeedPolicy seeds{7};
        double sup = 0.0;
        for (std::uint64_t rep = 0; rep < 50; ++rep) {
            auto p = simulate_pair(spec, grid, seeds, rep);
            auto m1 = mme_theta1(p.x, spec, grid, spec.eps);
            auto m2 = mde_theta2(p.x, m1.value, spec, mde_ctx, grid);
            PreliminaryPair prelim{m1.value, m2.value, m1.window, tau2, m2.identifiable};
            auto os = one_step_process(spec, p, prelim, tau2, grid);
            sup = std::max(sup, std::abs(os.th1.back() - os.th1_lim.back()));
            sup = std::max(sup, std::abs(os.th2.back() - os.th2_lim.back()));
        }
        CHECK(sup <= 0.1 * spec.eps);
    }
}
