#include "akf/mc.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "akf/adaptive.hpp"
#include "akf/estim1.hpp"
#include "akf/estim2.hpp"
#include "akf/estim3.hpp"
#include "akf/filter.hpp"
#include "akf/model.hpp"
#include "akf/numerics.hpp"
#include "akf/oracle.hpp"
#include "akf/riccati.hpp"
#include "akf/sde.hpp"
#include "akf/stats.hpp"

namespace akf {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, 64));
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr err;
    auto body = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

namespace {

using nlohmann::json;

struct CheckContext {
    std::uint64_t seed = 0;
    int workers = 0;
    std::size_t m_override = 0;

    std::size_t m(std::size_t dflt) const { return m_override ? m_override : dflt; }
};

// grid policy: discretization error stays below statistical error at the
// smallest eps in the sweeps
std::size_t steps_for(double eps) {
    return std::max<std::size_t>(16384, static_cast<std::size_t>(std::ceil(8.0 / eps)));
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

bool within(double value, double target, double rel_tol) {
    return std::abs(value - target) <= rel_tol * std::abs(target);
}

void note(CheckResult& r, bool ok, const std::string& text) {
    r.lines.push_back(std::string(ok ? "  [ok]   " : "  [FAIL] ") + text);
    r.pass = r.pass && ok;
}

// ---- pinned model configurations ----------------------------------------

ModelSpecI spec1_standard(double eps) {
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

// Two-parameter acceptance configuration. The drift ramps in time
// (a = theta2 * t), which kills the leading short-window bias of the moment
// estimator and leaves the drift parameter identifiable from curvature on
// [0, tau]; modest observation noise keeps the preliminary stage accurate
// enough for the scoring correction to reach the efficient rate at eps = 0.01.
ModelSpecII spec2_accept(double eps) {
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
constexpr double kModel2Horizon = 2.0;
constexpr double kModel2Tau = 1.3;

// Random-start acceptance configuration: strong observation channel so the
// conditional law is visible at desk-scale eps, spread-out initial values so
// the conditioning threshold 0.1 d keeps most replicates clear of the
// heavy-tail regime.
ModelSpecIII spec3_accept(double eps) {
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
constexpr double kModel3Horizon = 2.0;
constexpr double kModel3TauFrac = 0.1;

struct Model3Windows {
    std::size_t tau_node, n1, n2;
    double tau, t1, t2;
};
Model3Windows model3_windows(const TimeGrid& grid) {
    Model3Windows w;
    w.tau_node = grid.ceil_index(kModel3TauFrac * grid.horizon);
    w.n1 = w.tau_node / 2;
    w.n2 = (3 * w.tau_node) / 4;
    w.tau = grid.node(w.tau_node);
    w.t1 = grid.node(w.n1);
    w.t2 = grid.node(w.n2);
    return w;
}

// ---- criterion 1 ---------------------------------------------------------

CheckResult check_riccati_closed_forms(const CheckContext&) {
    CheckResult r;
    r.name = "riccati_closed_forms";
    r.pass = true;

    TimeGrid grid(1.0, 1u << 18);
    // zero-drift unit case against tanh
    {
        auto spec = spec1_standard(0.1);
        auto tr = solve_riccati(spec, grid, 0.0);
        double sup = 0.0;
        for (std::size_t k = 0; k < grid.n_nodes(); ++k)
            sup = std::max(sup, std::abs(tr.gamma[k] - std::tanh(grid.node(k))));
        note(r, sup <= 1e-8, "ODE solve vs tanh: sup gap " + fmt(sup));
        r.stats["tanh_sup_gap"] = sup;
    }
    // large initial value d^2/eps^2 against the explicit solution
    {
        Coefficient one = Coefficient::constant(1.0);
        auto tr = solve_riccati(one, one, one, [](double) { return 1.0; }, grid, 100.0);
        double sup = 0.0;
        for (std::size_t k = 0; k < grid.n_nodes(); ++k)
            sup = std::max(sup, std::abs(tr.gamma[k] -
                                         riccati_closed_form(1.0, 1.0, 1.0, 1.0, 1.0, 0.1, grid.node(k))));
        note(r, sup <= 1e-8, "ODE solve vs explicit large-start solution: sup gap " + fmt(sup));
        r.stats["explicit_sup_gap"] = sup;
    }
    return r;
}

// ---- criterion 2 ---------------------------------------------------------

CheckResult check_filter_vs_oracle(const CheckContext& ctx) {
    CheckResult r;
    r.name = "filter_vs_oracle";
    r.pass = true;

    ModelSpecI spec = spec1_standard(0.05);
    spec.a = Coefficient::constant(0.5);
    const std::size_t fine_steps = 1u << 15;
    TimeGrid fine(1.0, fine_steps);
    const std::size_t n_paths = ctx.m(8);
    SeedPolicy seeds{ctx.seed};

    const std::size_t levels[3] = {1u << 13, 1u << 14, 1u << 15};
    std::vector<TimeGrid> grids;
    std::vector<RiccatiTrace> rics;
    std::vector<CoefficientGrid> cgs;
    for (std::size_t l = 0; l < 3; ++l) {
        grids.emplace_back(1.0, levels[l]);
        rics.push_back(solve_riccati(spec, grids[l], 0.0));
        cgs.push_back(CoefficientGrid::sample(spec, grids[l]));
    }

    std::vector<std::array<double, 3>> gaps(n_paths);
    parallel_for(n_paths, ctx.workers, [&](std::size_t i) {
        auto path = simulate_pair(spec, fine, seeds, i);
        for (std::size_t l = 0; l < 3; ++l) {
            const std::size_t stride = fine_steps / levels[l];
            std::vector<double> dx(levels[l]);
            for (std::size_t k = 0; k < levels[l]; ++k)
                dx[k] = path.x[(k + 1) * stride] - path.x[k * stride];
            auto ft = kb_filter(rics[l], cgs[l], spec.theta_true, dx);
            auto ok = discrete_kalman(cgs[l], grids[l], spec.eps, spec.theta_true, 0.0, dx);
            double sup = 0.0;
            for (std::size_t k = 0; k < grids[l].n_nodes(); ++k)
                sup = std::max(sup, std::abs(ft.m[k] - ok.mean[k]));
            gaps[i][l] = sup;
        }
    });

    double g0 = 0.0, g1 = 0.0, g2 = 0.0;
    for (const auto& g : gaps) {
        g0 += g[0];
        g1 += g[1];
        g2 += g[2];
    }
    g0 /= static_cast<double>(n_paths);
    g1 /= static_cast<double>(n_paths);
    g2 /= static_cast<double>(n_paths);
    double r1 = g0 / g1, r2 = g1 / g2;
    r.stats["gap_coarse"] = g0;
    r.stats["gap_mid"] = g1;
    r.stats["gap_fine"] = g2;
    r.stats["ratio_1"] = r1;
    r.stats["ratio_2"] = r2;
    r.table = {{"steps", "mean_sup_gap"},
               {"8192", fmt(g0)},
               {"16384", fmt(g1)},
               {"32768", fmt(g2)}};
    note(r, r1 >= 1.7 && r1 <= 2.3, "gap halving coarse->mid: ratio " + fmt(r1));
    note(r, r2 >= 1.7 && r2 <= 2.3, "gap halving mid->fine: ratio " + fmt(r2));
    return r;
}

// ---- criterion 3 ---------------------------------------------------------

CheckResult check_model1_mle_law(const CheckContext& ctx) {
    CheckResult r;
    r.name = "model1_mle_law";
    r.pass = true;

    const double eps = 0.01;
    ModelSpecI spec = spec1_standard(eps);
    TimeGrid grid(1.0, steps_for(eps));
    auto setup = Model1Setup::build(spec, grid);
    const std::size_t m = ctx.m(2000);
    SeedPolicy seeds{ctx.seed};

    std::vector<double> samples(m);
    parallel_for(m, ctx.workers, [&](std::size_t i) {
        auto path = simulate_pair(spec, grid, seeds, i);
        auto dx = path.x_increments();
        auto obs = observation_part(setup.ric, setup.cg, dx);
        auto est = mle_batch(setup, obs, dx, grid.steps, spec.theta);
        samples[i] = (est.value - spec.theta_true) / eps;
    });

    const double target = 1.0 / setup.fisher.back();  // 1/I^T, = 1/tanh(T) here
    auto nc = normality_check(samples, target);
    r.stats["target_variance"] = target;
    r.stats["variance_ratio"] = nc.variance_ratio;
    r.stats["ks"] = nc.ks;
    r.stats["ks_critical_1pct"] = ks_critical(nc.n, 0.01);
    note(r, within(nc.variance_ratio, 1.0, 0.05),
         "normalized variance within 5% of 1/I^T: ratio " + fmt(nc.variance_ratio));
    note(r, nc.ks_pass, "KS vs normal at 1%: D " + fmt(nc.ks));
    return r;
}

// ---- criterion 4 ---------------------------------------------------------

CheckResult check_model1_recurrent_vs_batch(const CheckContext& ctx) {
    CheckResult r;
    r.name = "model1_recurrent_vs_batch";
    r.pass = true;

    const double eps = 0.01;
    ModelSpecI spec = spec1_standard(eps);
    TimeGrid grid(1.0, 1u << 16);
    auto setup = Model1Setup::build(spec, grid);
    const std::size_t tau_node = grid.ceil_index(0.05);
    const std::size_t n_paths = ctx.m(10);
    SeedPolicy seeds{ctx.seed};

    std::vector<double> sup_gap(n_paths);
    parallel_for(n_paths, ctx.workers, [&](std::size_t i) {
        auto path = simulate_pair(spec, grid, seeds, i);
        auto dx = path.x_increments();
        auto obs = observation_part(setup.ric, setup.cg, dx);
        auto rec = mle_recurrent(setup, obs, dx, tau_node, spec.theta);
        // batch value at every node via one cumulative pass
        double sup = 0.0, score = 0.0;
        const double dt = grid.dt();
        for (std::size_t k = 0; k <= grid.steps; ++k) {
            if (k > 0) {
                std::size_t j = k - 1;
                double w = setup.cg.f[j] * obs.phi0[j] / (setup.cg.sigma[j] * setup.cg.sigma[j]);
                score += w * (dx[j] - setup.cg.f[j] * obs.h[j] * dt);
            }
            if (k >= tau_node) {
                double batch = spec.theta.clamp(score / setup.fisher[k]);
                double gap = std::abs(rec.at(k) - batch) / std::max(std::abs(batch), 1e-9);
                sup = std::max(sup, gap);
            }
        }
        sup_gap[i] = sup;
    });
    double worst = 0.0;
    for (double g : sup_gap) worst = std::max(worst, g);
    r.stats["sup_relative_gap"] = worst;
    note(r, worst <= 1e-4, "recurrent vs batch sup relative gap " + fmt(worst));

    // information-ratio identity for the decay factor of the recursion
    NormalStream pick(ctx.seed, 9001, NoiseLane::initial);
    double worst_id = 0.0;
    std::vector<double> integrand(grid.n_nodes());
    for (std::size_t k = 0; k < grid.n_nodes(); ++k)
        integrand[k] = setup.g[k] * setup.g[k] / setup.fisher[std::max(k, tau_node)];
    for (int trial = 0; trial < 100; ++trial) {
        auto draw = [&](std::size_t lo, std::size_t hi) {
            return lo + static_cast<std::size_t>(pick.uniform01() * static_cast<double>(hi - lo));
        };
        std::size_t i = draw(tau_node, grid.steps);
        std::size_t j = draw(i + 1, grid.steps + 1);
        // independent quadrature of the decay exponent vs the information ratio
        double expo = simpson(integrand, grid.dt(), i, j);
        double lhs = std::exp(-expo);
        double rhs = setup.fisher[i] / setup.fisher[j];
        worst_id = std::max(worst_id, std::abs(lhs - rhs) / rhs);
    }
    r.stats["decay_identity_gap"] = worst_id;
    note(r, worst_id <= 1e-10, "decay factor equals information ratio: gap " + fmt(worst_id));
    return r;
}

// ---- criterion 5 ---------------------------------------------------------

CheckResult check_model1_adaptive_efficiency(const CheckContext& ctx) {
    CheckResult r;
    r.name = "model1_adaptive_efficiency";
    r.pass = true;

    const double eps = 0.01;
    ModelSpecI spec = spec1_standard(eps);
    TimeGrid grid(1.0, steps_for(eps));
    auto setup = Model1Setup::build(spec, grid);
    const std::size_t tau_node = grid.ceil_index(0.05);
    const std::size_t m = ctx.m(2000);
    SeedPolicy seeds{ctx.seed};

    std::vector<double> samples(m);
    parallel_for(m, ctx.workers, [&](std::size_t i) {
        auto path = simulate_pair(spec, grid, seeds, i);
        auto dx = path.x_increments();
        auto obs = observation_part(setup.ric, setup.cg, dx);
        auto est = mle_recurrent(setup, obs, dx, tau_node, spec.theta);
        auto ad = adaptive_filter_i(setup, obs, est);
        double m_true = spec.theta_true * obs.phi0[grid.steps] + obs.h[grid.steps];
        samples[i] = (ad.at(grid.steps) - m_true) / eps;
    });

    const double target = efficiency_bound(setup, grid.steps);
    const double var = variance(samples);
    r.stats["target"] = target;
    r.stats["normalized_terminal_variance"] = var;
    note(r, within(var, target, 0.10),
         "adaptive filter terminal variance " + fmt(var) + " vs bound " + fmt(target));
    return r;
}

// ---- criterion 6 ---------------------------------------------------------

CheckResult check_model2_preliminary_rates(const CheckContext& ctx) {
    CheckResult r;
    r.name = "model2_preliminary_rates";
    r.pass = true;

    const std::vector<double> eps_list = {1e-1, 3.1622776601683795e-2, 1e-2,
                                          3.1622776601683795e-3, 1e-3};
    const std::size_t m = ctx.m(2000);

    std::vector<double> mme_median(eps_list.size()), mde_median(eps_list.size());
    r.table.push_back({"eps", "mme_median_abs_err", "mde_median_abs_err"});
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
        const double eps = eps_list[e];
        ModelSpecII spec = spec2_accept(eps);
        TimeGrid grid(kModel2Horizon, steps_for(eps));
        const double tau = grid.node(grid.ceil_index(kModel2Tau));
        auto mde_ctx = MdeContext::build(spec, tau, grid);
        SeedPolicy seeds{ctx.seed + e};

        std::vector<double> e1(m), e2(m);
        parallel_for(m, ctx.workers, [&](std::size_t i) {
            auto path = simulate_pair(spec, grid, seeds, i);
            auto m1 = mme_theta1(path.x, spec, grid, eps);
            auto m2 = mde_theta2(path.x, m1.value, spec, mde_ctx, grid);
            e1[i] = std::abs(m1.value - spec.theta1_true);
            e2[i] = std::abs(m2.value - spec.theta2_true);
        });
        mme_median[e] = median(e1);
        mde_median[e] = median(e2);
        r.table.push_back({fmt(eps), fmt(mme_median[e]), fmt(mde_median[e])});
    }

    auto fit1 = rate_fit(eps_list, mme_median);
    auto fit2 = rate_fit(eps_list, mde_median);
    r.stats["mme_slope"] = fit1.slope;
    r.stats["mde_slope"] = fit2.slope;
    note(r, fit1.ok && std::abs(fit1.slope - 2.0 / 3.0) <= 0.1,
         "moment estimator rate: slope " + fmt(fit1.slope));
    note(r, fit2.ok && std::abs(fit2.slope - 2.0 / 3.0) <= 0.1,
         "distance estimator rate: slope " + fmt(fit2.slope));
    return r;
}

// ---- criterion 7 ---------------------------------------------------------

CheckResult check_model2_one_step_law(const CheckContext& ctx) {
    CheckResult r;
    r.name = "model2_one_step_law";
    r.pass = true;

    const double eps = 0.01;
    ModelSpecII spec = spec2_accept(eps);
    TimeGrid grid(kModel2Horizon, steps_for(eps));
    const double tau = grid.node(grid.ceil_index(kModel2Tau));
    const std::size_t tau_node = grid.index_of(tau);
    auto mde_ctx = MdeContext::build(spec, tau, grid);
    const std::size_t m = ctx.m(2000);
    SeedPolicy seeds{ctx.seed};

    std::vector<double> h1(m), h2(m), p1(m), p2(m);
    parallel_for(m, ctx.workers, [&](std::size_t i) {
        auto path = simulate_pair(spec, grid, seeds, i);
        auto m1 = mme_theta1(path.x, spec, grid, eps);
        auto m2 = mde_theta2(path.x, m1.value, spec, mde_ctx, grid);
        PreliminaryPair prelim{m1.value, m2.value, m1.window, tau, m2.identifiable};
        auto os = one_step_process(spec, path, prelim, tau, grid);
        h1[i] = (os.th1.back() - spec.theta1_true) / eps;
        h2[i] = (os.th2.back() - spec.theta2_true) / eps;
        p1[i] = m1.value - spec.theta1_true;
        p2[i] = m2.value - spec.theta2_true;
    });

    auto fisher = fisher_matrix(spec, spec.theta1_true, spec.theta2_true, tau_node, grid);
    Mat2 inv;
    if (!fisher.mat.back().inverse(inv))
        throw std::runtime_error("model2_one_step_law: target information degenerate");
    const double c11 = variance(h1), c22 = variance(h2), c12 = covariance(h1, h2);
    r.stats["target"] = {{"c11", inv.a11}, {"c12", inv.a12}, {"c22", inv.a22}};
    r.stats["empirical"] = {{"c11", c11}, {"c12", c12}, {"c22", c22}};
    note(r, within(c11, inv.a11, 0.15), "cov(1,1) " + fmt(c11) + " vs " + fmt(inv.a11));
    note(r, within(c12, inv.a12, 0.15), "cov(1,2) " + fmt(c12) + " vs " + fmt(inv.a12));
    note(r, within(c22, inv.a22, 0.15), "cov(2,2) " + fmt(c22) + " vs " + fmt(inv.a22));

    double rms_pre = 0.0, rms_post = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        rms_pre += p1[i] * p1[i] + p2[i] * p2[i];
        rms_post += eps * eps * (h1[i] * h1[i] + h2[i] * h2[i]);
    }
    rms_pre = std::sqrt(rms_pre / static_cast<double>(m));
    rms_post = std::sqrt(rms_post / static_cast<double>(m));
    r.stats["rms_preliminary"] = rms_pre;
    r.stats["rms_one_step"] = rms_post;
    note(r, rms_post < rms_pre,
         "rate upgrade: one-step RMS " + fmt(rms_post) + " < preliminary RMS " + fmt(rms_pre));
    return r;
}

// ---- criterion 8 ---------------------------------------------------------

CheckResult check_sensitivity_fd(const CheckContext& ctx) {
    CheckResult r;
    r.name = "sensitivity_fd";
    r.pass = true;
    const double h = 1e-4;

    {  // two-parameter model
        const double eps = 0.05;
        ModelSpecII spec = spec2_accept(eps);
        TimeGrid grid(kModel2Horizon, 1u << 12);
        SeedPolicy seeds{ctx.seed};
        auto path = simulate_pair(spec, grid, seeds, 7);
        auto dx = path.x_increments();
        const double t1 = spec.theta1_true, t2 = spec.theta2_true;
        auto mf = filter_sensitivities(spec, t1, t2, dx, grid);
        auto lo2 = filter_sensitivities(spec, t1, t2 - h, dx, grid);
        auto hi2 = filter_sensitivities(spec, t1, t2 + h, dx, grid);
        auto lo1 = kb_filter(spec, t1 - h, t2, path, mf.ric);
        auto hi1 = kb_filter(spec, t1 + h, t2, path, mf.ric);
        double sup1 = 0.0, sup2 = 0.0;
        for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
            sup1 = std::max(sup1, std::abs(mf.mdot1[k] - (hi1.m[k] - lo1.m[k]) / (2.0 * h)));
            sup2 = std::max(sup2, std::abs(mf.mdot2[k] - (hi2.ft.m[k] - lo2.ft.m[k]) / (2.0 * h)));
        }
        r.stats["mdot1_fd_gap"] = sup1;
        r.stats["mdot2_fd_gap"] = sup2;
        note(r, sup1 <= 1e-5, "initial-value sensitivity vs finite difference: " + fmt(sup1));
        note(r, sup2 <= 1e-5, "drift sensitivity vs finite difference: " + fmt(sup2));
    }
    {  // random-start model
        const double eps = 0.01;
        ModelSpecIII spec = spec3_accept(eps);
        TimeGrid grid(kModel3Horizon, 1u << 13);
        auto w = model3_windows(grid);
        SeedPolicy seeds{ctx.seed};
        auto path = simulate_pair(spec, grid, seeds, 7);
        auto dx = path.x_increments();
        auto mf = filter_sensitivity_iii(spec, spec.theta_true, dx, w.tau, grid);
        auto lo = filter_sensitivity_iii(spec, spec.theta_true - h, dx, w.tau, grid);
        auto hi = filter_sensitivity_iii(spec, spec.theta_true + h, dx, w.tau, grid);
        double sup = 0.0;
        for (std::size_t k = w.tau_node; k < grid.n_nodes(); ++k)
            sup = std::max(sup, std::abs(mf.mdot[k] - (hi.m[k] - lo.m[k]) / (2.0 * h)));
        r.stats["mdot3_fd_gap"] = sup;
        note(r, sup <= 1e-5, "random-start sensitivity vs finite difference: " + fmt(sup));
    }
    return r;
}

// ---- criterion 9 ---------------------------------------------------------

CheckResult check_model3_conditional_law(const CheckContext& ctx) {
    CheckResult r;
    r.name = "model3_conditional_law";
    r.pass = true;

    const double eps = 0.01;
    ModelSpecIII spec = spec3_accept(eps);
    TimeGrid grid(kModel3Horizon, steps_for(eps));
    auto w = model3_windows(grid);
    const std::size_t m = ctx.m(2000);
    SeedPolicy seeds{ctx.seed};

    std::vector<double> norm_err(m, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> raw_err(m, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> y0s(m);
    std::vector<char> informative(m, 0);
    parallel_for(m, ctx.workers, [&](std::size_t i) {
        auto path = simulate_pair(spec, grid, seeds, i);
        auto prelim = mme_log_ratio(path.x, grid, w.t1, w.t2, eps, spec.theta);
        auto os = one_step_iii(spec, path, prelim, w.tau, grid);
        y0s[i] = path.y0;
        informative[i] = prelim.informative ? 1 : 0;
        if (!prelim.informative) return;
        double err = os.value.back() - spec.theta_true;
        raw_err[i] = err / eps;
        norm_err[i] = path.y0 * err / eps;
    });

    const double d = std::sqrt(spec.d2);
    std::vector<double> conditioned, unconditioned;
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (!informative[i]) {
            ++flagged;
            continue;
        }
        unconditioned.push_back(raw_err[i]);
        if (std::abs(y0s[i]) > 0.1 * d) conditioned.push_back(norm_err[i]);
    }
    r.stats["noninformative_rate"] = static_cast<double>(flagged) / static_cast<double>(m);
    r.stats["conditioned_n"] = conditioned.size();

    auto j = j_limit_trace(spec, spec.theta_true, w.tau, grid);
    const double target = 1.0 / j.back();
    const double var_cond = variance(conditioned);
    r.stats["target_variance"] = target;
    r.stats["conditional_variance"] = var_cond;
    note(r, within(var_cond, target, 0.15),
         "conditional variance " + fmt(var_cond) + " vs 1/J " + fmt(target));

    auto nc = normality_check(unconditioned, target);
    r.stats["unconditioned_heavy_tail"] = nc.heavy_tail;
    note(r, nc.heavy_tail, "un-normalized errors trip the heavy-tail detector");
    return r;
}

// ---- criterion 10 --------------------------------------------------------

CheckResult check_model3_adaptive_filter(const CheckContext& ctx) {
    CheckResult r;
    r.name = "model3_adaptive_filter";
    r.pass = true;

    const std::vector<double> eps_list = {0.02, 0.005};
    const std::size_t m = ctx.m(1000);

    std::vector<double> strata_small, strata_large;  // filled at the smallest eps
    for (double eps : eps_list) {
        ModelSpecIII spec = spec3_accept(eps);
        TimeGrid grid(kModel3Horizon, steps_for(eps));
        auto w = model3_windows(grid);
        SeedPolicy seeds{ctx.seed + static_cast<std::uint64_t>(1e6 * eps)};
        const double d = std::sqrt(spec.d2);

        std::vector<double> se_ad(m, std::numeric_limits<double>::quiet_NaN());
        std::vector<double> se_or(m, std::numeric_limits<double>::quiet_NaN());
        std::vector<double> nerr(m, std::numeric_limits<double>::quiet_NaN());
        std::vector<double> y0s(m);
        parallel_for(m, ctx.workers, [&](std::size_t i) {
            auto path = simulate_pair(spec, grid, seeds, i);
            y0s[i] = path.y0;
            auto dx = path.x_increments();
            auto prelim = mme_log_ratio(path.x, grid, w.t1, w.t2, eps, spec.theta);
            if (!prelim.informative) return;
            auto os = one_step_iii(spec, path, prelim, w.tau, grid);
            auto ad = adaptive_filter_iii(spec, path, os, w.tau, grid);
            auto oracle = filter_sensitivity_iii(spec, spec.theta_true, dx, w.tau, grid);
            double yT = path.y.back();
            double ea = ad.m.back() - yT;
            double eo = oracle.m.back() - yT;
            se_ad[i] = ea * ea;
            se_or[i] = eo * eo;
            nerr[i] = (ad.m.back() - oracle.m.back()) / eps;
        });

        double mse_ad = 0.0, mse_or = 0.0;
        std::size_t used = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (std::isnan(se_ad[i])) continue;
            mse_ad += se_ad[i];
            mse_or += se_or[i];
            ++used;
        }
        mse_ad /= static_cast<double>(used);
        mse_or /= static_cast<double>(used);
        double ratio = mse_ad / mse_or;
        r.stats["mse_ratio_eps_" + fmt(eps)] = ratio;
        note(r, within(ratio, 1.0, 0.10),
             "adaptive/oracle MSE ratio at eps " + fmt(eps) + ": " + fmt(ratio));

        if (eps == eps_list.back()) {
            for (std::size_t i = 0; i < m; ++i) {
                if (std::isnan(nerr[i])) continue;
                double ay = std::abs(y0s[i]);
                if (ay <= 0.1 * d) continue;  // heavy-tail exclusion
                if (ay <= 0.6745 * d)
                    strata_small.push_back(nerr[i]);
                else
                    strata_large.push_back(nerr[i]);
            }
        }
    }

    // normalized terminal error variance must agree across initial-value
    // strata: 95% confidence intervals overlap
    auto ci = [](const std::vector<double>& v) {
        double s2 = variance(v);
        double hw = 1.959964 * std::sqrt(2.0 / static_cast<double>(v.size() - 1));
        return std::pair<double, double>{s2 * (1.0 - hw), s2 * (1.0 + hw)};
    };
    auto [lo_s, hi_s] = ci(strata_small);
    auto [lo_l, hi_l] = ci(strata_large);
    bool overlap = lo_s <= hi_l && lo_l <= hi_s;
    r.stats["strata_small_var"] = variance(strata_small);
    r.stats["strata_large_var"] = variance(strata_large);
    note(r, overlap, "normalized error variance agrees across initial-value strata: [" +
                         fmt(lo_s) + "," + fmt(hi_s) + "] vs [" + fmt(lo_l) + "," + fmt(hi_l) + "]");
    return r;
}

// ---- calibration ---------------------------------------------------------

CheckResult check_calibration_normal(const CheckContext& ctx) {
    CheckResult r;
    r.name = "calibration_normal";
    r.pass = true;
    const std::size_t m = std::max<std::size_t>(ctx.m(2000), 200);

    NormalStream gauss(ctx.seed, 424242, NoiseLane::observation);
    std::vector<double> normals(m);
    for (auto& x : normals) x = gauss.next();
    auto nc = normality_check(normals, 1.0);
    note(r, nc.var_pass && nc.ks_pass && !nc.heavy_tail,
         "standard normal sample passes against unit target");

    NormalStream num(ctx.seed, 424243, NoiseLane::observation);
    NormalStream den(ctx.seed, 424244, NoiseLane::observation);
    std::vector<double> cauchy(m);
    for (auto& x : cauchy) {
        double d;
        do {
            d = den.next();
        } while (std::abs(d) < 1e-300);
        x = num.next() / d;
    }
    auto hc = normality_check(cauchy, 1.0);
    note(r, hc.heavy_tail && !hc.var_pass, "heavy-tailed sample is rejected with a tail note");
    return r;
}

// Designed failure: asserts a variance twice the true law. Used to verify
// that a wrong target makes the experiment exit nonzero.
CheckResult check_calibration_variance_mismatch(const CheckContext& ctx) {
    CheckResult r;
    r.name = "calibration_variance_mismatch";
    r.pass = true;
    const std::size_t m = std::max<std::size_t>(ctx.m(2000), 200);
    NormalStream gauss(ctx.seed, 515151, NoiseLane::observation);
    std::vector<double> normals(m);
    for (auto& x : normals) x = gauss.next();
    auto nc = normality_check(normals, 2.0);
    note(r, within(nc.variance_ratio, 1.0, 0.05),
         "variance matches the doubled target (expected to fail)");
    return r;
}

// ---- registry ------------------------------------------------------------

using CheckFn = CheckResult (*)(const CheckContext&);
struct Entry {
    const char* name;
    CheckFn fn;
};

constexpr Entry kRegistry[] = {
    {"riccati_closed_forms", check_riccati_closed_forms},
    {"filter_vs_oracle", check_filter_vs_oracle},
    {"model1_mle_law", check_model1_mle_law},
    {"model1_recurrent_vs_batch", check_model1_recurrent_vs_batch},
    {"model1_adaptive_efficiency", check_model1_adaptive_efficiency},
    {"model2_preliminary_rates", check_model2_preliminary_rates},
    {"model2_one_step_law", check_model2_one_step_law},
    {"sensitivity_fd", check_sensitivity_fd},
    {"model3_conditional_law", check_model3_conditional_law},
    {"model3_adaptive_filter", check_model3_adaptive_filter},
    {"determinism", nullptr},
    {"calibration_normal", check_calibration_normal},
    {"calibration_variance_mismatch", check_calibration_variance_mismatch},
};

CheckFn find_check(const std::string& name) {
    for (const auto& e : kRegistry)
        if (name == e.name) return e.fn;
    throw std::invalid_argument("unknown check '" + name + "'");
}

json result_json(const CheckResult& c) {
    json j;
    j["name"] = c.name;
    j["pass"] = c.pass;
    j["stats"] = c.stats;
    j["lines"] = c.lines;
    return j;
}

}  // namespace

std::vector<std::string> available_checks() {
    std::vector<std::string> out;
    for (const auto& e : kRegistry) out.emplace_back(e.name);
    return out;
}

bool is_check(const std::string& name) {
    for (const auto& e : kRegistry)
        if (name == e.name) return true;
    return false;
}

bool ExperimentReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

json ExperimentReport::to_json() const {
    json j;
    j["master_seed"] = master_seed;
    j["all_pass"] = all_pass();
    j["checks"] = json::array();
    for (const auto& c : checks) j["checks"].push_back(result_json(c));
    return j;
}

ExperimentReport run_experiment(const ExperimentPlan& plan) {
    if (plan.checks.empty()) throw std::invalid_argument("experiment plan: no checks requested");
    for (const auto& name : plan.checks) find_check(name);  // validate names up front

    ExperimentReport report;
    report.master_seed = plan.master_seed;
    CheckContext ctx{plan.master_seed, plan.workers, plan.replicates_override};

    bool want_determinism = false;
    for (const auto& name : plan.checks) {
        if (name == "determinism") {
            want_determinism = true;
            continue;
        }
        report.checks.push_back(find_check(name)(ctx));
    }

    if (want_determinism) {
        // one extra pass of every other check at a different worker count;
        // canonical report content must not move by a byte
        CheckResult det;
        det.name = "determinism";
        det.pass = true;
        CheckContext alt = ctx;
        alt.workers = (plan.workers == 1) ? 0 : 1;
        std::size_t idx = 0;
        for (const auto& name : plan.checks) {
            if (name == "determinism") continue;
            CheckResult again = find_check(name)(alt);
            bool same = result_json(again).dump() == result_json(report.checks[idx]).dump();
            note(det, same, std::string(name) + " reproduces byte-identically across worker counts");
            ++idx;
        }
        if (idx == 0) note(det, true, "no sibling checks to replay");
        report.checks.push_back(det);
    }
    return report;
}

}  // namespace akf
