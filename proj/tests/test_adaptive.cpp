#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "akf/adaptive.hpp"
#include "akf/mc.hpp"
#include "akf/stats.hpp"

using namespace akf;

namespace {

ModelSpecI spec1(double eps) {
    ModelSpecI s;
    s.f = Coefficient::constant(1.0);
    s.sigma = Coefficient::constant(1.0);
    s.a = Coefficient::constant(0.0);
    s.b = Coefficient::constant(1.0);
    s.eps = eps;
    s.theta = Interval{-2.0, 4.0};
    s.theta_true = 1.0;
    return s;
}

ModelSpecII spec2(double eps) {
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

ModelSpecIII spec3(double eps) {
    ModelSpecIII s;
    s.f = 5.0;
    s.sigma = 0.05;
    s.b = 1.0;
    s.d2 = 9.0;
    s.eps = eps;
    s.theta = Interval{0.3, 2.5};
    s.theta_true = 1.0;
    return s;
}

}  // namespace

TEST_CASE("initial-value model: error factorization and zero-noise plug-in") {
    TimeGrid grid(1.0, 1 << 12);
    const std::size_t tau_node = grid.ceil_index(0.05);

    {  // zero noise: the adaptive trace reproduces the true-parameter filter
        auto clean = spec1(1e-300);
        auto setup = Model1Setup::build(clean, grid);
        SeedPolicy seeds{21};
        auto p = simulate_pair(clean, grid, seeds, 0);
        auto dx = p.x_increments();
        auto obs = observation_part(setup.ric, setup.cg, dx);
        auto est = mle_recurrent(setup, obs, dx, tau_node, clean.theta);
        auto ad = adaptive_filter_i(setup, obs, est);
        double sup = 0.0;
        for (std::size_t k = tau_node; k <= grid.steps; ++k) {
            double m_true = clean.theta_true * obs.phi0[k] + obs.h[k];
            sup = std::max(sup, std::abs(ad.at(k) - m_true));
        }
        CHECK(sup <= 2e-3);
    }

    {  // the error equals (estimate - truth) * transition factor, node-wise
        auto spec = spec1(0.05);
        auto setup = Model1Setup::build(spec, grid);
        SeedPolicy seeds{22};
        auto p = simulate_pair(spec, grid, seeds, 0);
        auto dx = p.x_increments();
        auto obs = observation_part(setup.ric, setup.cg, dx);
        auto est = mle_recurrent(setup, obs, dx, tau_node, spec.theta);
        auto ad = adaptive_filter_i(setup, obs, est);
        for (std::size_t k = tau_node; k <= grid.steps; k += 64) {
            double m_true = spec.theta_true * obs.phi0[k] + obs.h[k];
            double lhs = ad.at(k) - m_true;
            double rhs = (est.at(k) - spec.theta_true) * obs.phi0[k];
            CHECK(std::abs(lhs - rhs) <= 1e-13 * (1.0 + std::abs(rhs)));
        }
    }
}

TEST_CASE("initial-value model: normalized terminal error law") {
    const double eps = 0.01;
    auto spec = spec1(eps);
    TimeGrid grid(1.0, 1 << 12);
    auto setup = Model1Setup::build(spec, grid);
    const std::size_t tau_node = grid.ceil_index(0.05);
    SeedPolicy seeds{23};
    const std::size_t m = 2000;
    std::vector<double> err(m);
    for (std::size_t i = 0; i < m; ++i) {
        auto p = simulate_pair(spec, grid, seeds, i);
        auto dx = p.x_increments();
        auto obs = observation_part(setup.ric, setup.cg, dx);
        auto est = mle_recurrent(setup, obs, dx, tau_node, spec.theta);
        auto ad = adaptive_filter_i(setup, obs, est);
        auto es = error_process(ad, kb_filter(setup.ric, setup.cg, spec.theta_true, dx).m,
                                eps, grid);
        err[i] = es.terminal;
    }
    auto nc = normality_check(err, efficiency_bound(setup, grid.steps));
    CHECK(nc.ks_pass);
    CHECK(std::abs(nc.variance_ratio - 1.0) <= 0.10);
}

TEST_CASE("initial-value model: error magnitude scales linearly in eps") {
    TimeGrid grid(1.0, 1 << 12);
    const std::size_t tau_node = grid.ceil_index(0.05);
    std::vector<double> eps_list = {0.04, 0.02, 0.01, 0.005};
    std::vector<double> mean_sup(eps_list.size());
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
        auto spec = spec1(eps_list[e]);
        auto setup = Model1Setup::build(spec, grid);
        SeedPolicy seeds{24 + e};
        const std::size_t m = 200;
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            auto p = simulate_pair(spec, grid, seeds, i);
            auto dx = p.x_increments();
            auto obs = observation_part(setup.ric, setup.cg, dx);
            auto est = mle_recurrent(setup, obs, dx, tau_node, spec.theta);
            auto ad = adaptive_filter_i(setup, obs, est);
            double sup = 0.0;
            for (std::size_t k = tau_node; k <= grid.steps; ++k) {
                double m_true = spec.theta_true * obs.phi0[k] + obs.h[k];
                sup = std::max(sup, std::abs(ad.at(k) - m_true));
            }
            acc += sup;
        }
        mean_sup[e] = acc / static_cast<double>(m);
    }
    // least squares in log-log over the short sweep
    double mx = 0.0, my = 0.0;
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
        mx += std::log(eps_list[e]);
        my += std::log(mean_sup[e]);
    }
    mx /= static_cast<double>(eps_list.size());
    my /= static_cast<double>(eps_list.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
        sxx += (std::log(eps_list[e]) - mx) * (std::log(eps_list[e]) - mx);
        sxy += (std::log(eps_list[e]) - mx) * (std::log(mean_sup[e]) - my);
    }
    CHECK(std::abs(sxy / sxx - 1.0) <= 0.15);
}

TEST_CASE("two-parameter model: pathwise mean reconstruction and plug-in") {
    TimeGrid grid(2.0, 1 << 13);
    SeedPolicy seeds{25};

    // effectively noiseless: reconstruction matches the filter everywhere
    auto clean = spec2(1e-300);
    auto p = simulate_pair(clean, grid, seeds, 0);
    auto ric = solve_riccati(clean, clean.theta2_true, grid);
    auto ft = kb_filter(clean, clean.theta1_true, clean.theta2_true, p, ric);
    for (std::size_t node : {grid.index_of(0.5), grid.index_of(1.0), grid.index_of(1.5)}) {
        double rec = filter_mean_pathwise(clean, clean.theta1_true, clean.theta2_true,
                                          p.x, node, grid);
        CHECK(rec == doctest::Approx(ft.m[node]).epsilon(5e-4));
    }

    // noisy path: reconstruction still tracks the filter at quadrature level
    auto noisy = spec2(0.02);
    auto pn = simulate_pair(noisy, grid, seeds, 1);
    auto ricn = solve_riccati(noisy, noisy.theta2_true, grid);
    auto ftn = kb_filter(noisy, noisy.theta1_true, noisy.theta2_true, pn, ricn);
    std::size_t node = grid.index_of(1.5);
    double rec = filter_mean_pathwise(noisy, noisy.theta1_true, noisy.theta2_true,
                                      pn.x, node, grid);
    CHECK(rec == doctest::Approx(ftn.m[node]).epsilon(2e-3));

    // adaptive run with the one-step pinned at the truth reproduces the filter
    const double tau = grid.node(grid.ceil_index(1.3));
    PreliminaryPair prelim{clean.theta1_true, clean.theta2_true, 0.05, tau, true};
    auto os = one_step_process(clean, p, prelim, tau, grid);
    const double tau_star = grid.node(grid.ceil_index(1.5));
    auto ad = adaptive_filter_ii(clean, p, os, tau_star, grid);
    double supm = 0.0, supg = 0.0;
    for (std::size_t k = ad.start; k <= grid.steps; ++k) {
        supm = std::max(supm, std::abs(ad.at(k) - ft.m[k]));
        supg = std::max(supg, std::abs(ad.gamma[k - ad.start] - ric.gamma[k]));
    }
    CHECK(supm <= 5e-3);
    CHECK(supg <= 5e-3);

    CHECK_THROWS(adaptive_filter_ii(clean, p, os, tau, grid));  // tau_star must exceed tau
}

TEST_CASE("two-parameter model: normalized error bounded and stable across eps") {
    TimeGrid grid(2.0, 1 << 13);
    const double tau = grid.node(grid.ceil_index(1.3));
    const double tau_star = grid.node(grid.ceil_index(1.5));
    std::vector<double> eps_list = {0.02, 0.01};
    std::vector<double> var_term(eps_list.size()), gam_scale(eps_list.size());
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
        auto spec = spec2(eps_list[e]);
        auto ctx = MdeContext::build(spec, tau, grid);
        auto ric0 = solve_riccati(spec, spec.theta2_true, grid);
        SeedPolicy seeds{26};
        const std::size_t m = 1000;
        std::vector<double> terminal(m), gsup(m);
        parallel_for(m, 0, [&](std::size_t i) {
            auto p = simulate_pair(spec, grid, seeds, i);
            auto m1 = mme_theta1(p.x, spec, grid, spec.eps);
            auto m2 = mde_theta2(p.x, m1.value, spec, ctx, grid);
            PreliminaryPair prelim{m1.value, m2.value, m1.window, tau, m2.identifiable};
            auto os = one_step_process(spec, p, prelim, tau, grid);
            auto ad = adaptive_filter_ii(spec, p, os, tau_star, grid);
            auto ft = kb_filter(spec, spec.theta1_true, spec.theta2_true, p, ric0);
            auto es = error_process(ad, ft.m, spec.eps, grid);
            terminal[i] = es.terminal;
            double g = 0.0;
            for (std::size_t k = ad.start; k <= grid.steps; ++k)
                g = std::max(g, std::abs(ad.gamma[k - ad.start] - ric0.gamma[k]) / spec.eps);
            gsup[i] = g;
        });
        var_term[e] = variance(terminal);
        gam_scale[e] = mean(gsup);
    }
    // O(eps) error: the normalized variance and variance-trace gap stabilize
    CHECK(var_term[1] / var_term[0] > 0.5);
    CHECK(var_term[1] / var_term[0] < 2.0);
    CHECK(gam_scale[1] / gam_scale[0] > 0.4);
    CHECK(gam_scale[1] / gam_scale[0] < 2.5);
}

TEST_CASE("random-start model: plug-in consistency and observability") {
    TimeGrid grid(2.0, 1 << 13);
    const std::size_t tau_node = grid.ceil_index(0.2);
    const double tau = grid.node(tau_node);

    {  // effectively noiseless with the true parameter plugged in
        auto clean = spec3(1e-8);
        SeedPolicy seeds{27};
        auto p = simulate_pair(clean, grid, seeds, 0, 1.8);
        Mme3Result prelim{clean.theta_true, true};
        auto os = one_step_iii(clean, p, prelim, tau, grid);
        auto ad = adaptive_filter_iii(clean, p, os, tau, grid);
        auto oracle = filter_sensitivity_iii(clean, clean.theta_true, p.x_increments(), tau, grid);
        double sup = 0.0;
        for (std::size_t k = tau_node; k <= grid.steps; ++k)
            sup = std::max(sup, std::abs(ad.at(k) - oracle.m[k]));
        CHECK(sup <= 5e-4);  // Euler-order agreement
    }

    {  // the adaptive trace never looks at the hidden path
        auto spec = spec3(0.01);
        SeedPolicy seeds{28};
        auto p = simulate_pair(spec, grid, seeds, 1);
        const double t1 = grid.node(tau_node / 2), t2 = grid.node((3 * tau_node) / 4);
        auto prelim = mme_log_ratio(p.x, grid, t1, t2, spec.eps, spec.theta);
        auto os = one_step_iii(spec, p, prelim, tau, grid);
        auto ad = adaptive_filter_iii(spec, p, os, tau, grid);
        PathPair blind = p;
        std::fill(blind.y.begin(), blind.y.end(), 0.0);
        auto os_b = one_step_iii(spec, blind, prelim, tau, grid);
        auto ad_b = adaptive_filter_iii(spec, blind, os_b, tau, grid);
        CHECK(ad.m == ad_b.m);  // bit-identical

        // non-informative preliminary propagates as an error
        Mme3Result bad{1.0, false};
        auto os_bad = one_step_iii(spec, p, bad, tau, grid);
        CHECK_THROWS(adaptive_filter_iii(spec, p, os_bad, tau, grid));
    }
}

TEST_CASE("error_process summarizes and rejects mismatched intervals") {
    TimeGrid grid(1.0, 256);
    AdaptiveTrace ad;
    ad.start = 100;
    ad.m.assign(grid.n_nodes() - 100, 2.0);
    std::vector<double> ref(grid.n_nodes(), 2.0);
    auto es = error_process(ad, ref, 0.1, grid);
    CHECK(es.sup == 0.0);
    CHECK(es.terminal == 0.0);
    CHECK(es.l2 == 0.0);

    ref[200] = 2.1;  // one-node bump of size 0.1 -> normalized 1.0
    auto es2 = error_process(ad, ref, 0.1, grid);
    CHECK(es2.sup == doctest::Approx(1.0));

    AdaptiveTrace short_tr;
    short_tr.start = 100;
    short_tr.m.assign(10, 0.0);
    CHECK_THROWS(error_process(short_tr, ref, 0.1, grid));
}
