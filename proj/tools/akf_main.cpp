// Command-line front end: simulate paths, run filters and estimators, execute
// experiment plans and render reports. One JSON config per run; see configs/.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "akf/adaptive.hpp"
#include "akf/config.hpp"
#include "akf/csvio.hpp"
#include "akf/estim1.hpp"
#include "akf/estim2.hpp"
#include "akf/estim3.hpp"
#include "akf/mc.hpp"
#include "akf/stats.hpp"

namespace fs = std::filesystem;
using namespace akf;

namespace {

struct GlobalOpts {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    int workers = 0;
    std::string format;
};

RunConfig load(const GlobalOpts& g) {
    if (g.config.empty()) throw std::runtime_error("--config is required");
    RunConfig rc = load_config(g.config);
    if (g.seed) rc.experiment.master_seed = *g.seed;
    if (!g.out.empty()) rc.output.dir = g.out;
    if (g.workers > 0) rc.experiment.workers = g.workers;
    if (g.format == "csv") {
        rc.output.csv = true;
        rc.output.json = false;
    } else if (g.format == "json") {
        rc.output.json = true;
    }
    fs::create_directories(rc.output.dir);
    return rc;
}

void ensure_valid(const RunConfig& rc) {
    ValidationReport rep;
    if (rc.kind == "det_init")
        rep = validate_model(rc.model1(), rc.grid);
    else if (rc.kind == "joint")
        rep = validate_model(rc.model2(), rc.grid);
    else
        rep = validate_model(rc.model3(), rc.grid);
    if (!rep.ok()) {
        for (const auto& v : rep.violations) std::cerr << "validation: " << v << "\n";
        throw std::runtime_error("model validation failed");
    }
}

PathPair simulate_from_config(const RunConfig& rc, std::uint64_t replicate) {
    SeedPolicy seeds{rc.experiment.master_seed};
    if (rc.kind == "det_init") return simulate_pair(rc.model1(), rc.grid, seeds, replicate);
    if (rc.kind == "joint") return simulate_pair(rc.model2(), rc.grid, seeds, replicate);
    return simulate_pair(rc.model3(), rc.grid, seeds, replicate);
}

int cmd_simulate(const GlobalOpts& g) {
    RunConfig rc = load(g);
    ensure_valid(rc);
    auto path = simulate_from_config(rc, 0);
    std::string file = rc.output.dir + "/paths.csv";
    write_path_csv(file, path);
    std::printf("simulate: %zu nodes, seed %llu -> %s\n", path.grid.n_nodes(),
                static_cast<unsigned long long>(rc.experiment.master_seed), file.c_str());
    return 0;
}

int cmd_filter(const GlobalOpts& g, const std::string& paths_in) {
    RunConfig rc = load(g);
    ensure_valid(rc);
    PathPair path = paths_in.empty() ? simulate_from_config(rc, 0) : read_path_csv(paths_in);
    if (!(path.grid == rc.grid)) throw std::runtime_error("paths file grid does not match config");
    auto dx = path.x_increments();
    std::vector<double> t(rc.grid.n_nodes());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = rc.grid.node(k);

    std::vector<double> m, gamma, phi0, h;
    if (rc.kind == "det_init") {
        auto setup = Model1Setup::build(rc.model1(), rc.grid);
        auto ft = kb_filter(setup.ric, setup.cg, rc.model1().theta_true, dx);
        m = ft.m;
        gamma = setup.ric.gamma;
        phi0 = ft.phi0;
        h = ft.h;
    } else if (rc.kind == "joint") {
        const auto& spec = rc.model2();
        auto ric = solve_riccati(spec, spec.theta2_true, rc.grid);
        auto cg = CoefficientGrid::sample(spec, spec.theta2_true, rc.grid);
        auto ft = kb_filter(ric, cg, spec.theta1_true, dx);
        m = ft.m;
        gamma = ric.gamma;
        phi0 = ft.phi0;
        h = ft.h;
    } else {
        const auto& spec = rc.model3();
        const double tau3 = rc.grid.node(rc.grid.ceil_index(rc.default_tau()));
        auto mf = filter_sensitivity_iii(spec, spec.theta_true, dx, tau3, rc.grid);
        m = mf.m;
        gamma.resize(t.size());
        phi0.resize(t.size());
        ConstRiccati cr{spec.theta_true, spec.f, spec.sigma, spec.b, spec.d2 / (spec.eps * spec.eps)};
        const double q = spec.f * spec.f / (spec.sigma * spec.sigma);
        for (std::size_t k = 0; k < t.size(); ++k) {
            gamma[k] = cr.value(t[k]);
            phi0[k] = std::exp(spec.theta_true * t[k] - q * cr.integral(t[k]));
        }
        h = m;  // zero start: the whole mean is observation-driven
    }
    std::string file = rc.output.dir + "/filter.csv";
    write_csv(file, {"t", "m", "gamma_star", "Phi_0t", "H"}, {t, m, gamma, phi0, h});
    std::printf("filter: wrote %s\n", file.c_str());
    return 0;
}

int cmd_estimate(const GlobalOpts& g, const std::string& paths_in) {
    RunConfig rc = load(g);
    ensure_valid(rc);
    PathPair path = paths_in.empty() ? simulate_from_config(rc, 0) : read_path_csv(paths_in);
    if (!(path.grid == rc.grid)) throw std::runtime_error("paths file grid does not match config");
    auto dx = path.x_increments();
    const double tau = rc.grid.node(rc.grid.ceil_index(rc.default_tau()));
    std::string file = rc.output.dir + "/estimate.csv";

    if (rc.kind == "det_init") {
        const auto& spec = rc.model1();
        auto setup = Model1Setup::build(spec, rc.grid);
        auto obs = observation_part(setup.ric, setup.cg, dx);
        auto tr = mle_recurrent(setup, obs, dx, rc.grid.index_of(tau), spec.theta,
                                rc.estimation.fisher_floor);
        std::vector<double> t(tr.value.size()), fisher(tr.fisher);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = rc.grid.node(tr.start + i);
        write_csv(file, {"t", "theta_hat", "fisher"}, {t, tr.value, fisher});
    } else if (rc.kind == "joint") {
        const auto& spec = rc.model2();
        auto prelim = preliminary_pair(path.x, spec, tau, rc.grid, spec.eps);
        auto os = one_step_process(spec, path, prelim, tau, rc.grid, rc.estimation.det_floor);
        std::vector<double> t(os.th1.size()), i11(t.size()), i12(t.size()), i22(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            t[i] = rc.grid.node(os.start + i);
            const Mat2& fm = os.fisher.mat[os.start + i];
            i11[i] = fm.a11;
            i12[i] = fm.a12;
            i22[i] = fm.a22;
        }
        write_csv(file, {"t", "theta1_star", "theta2_star", "I11", "I12", "I22"},
                  {t, os.th1, os.th2, i11, i12, i22});
    } else {
        const auto& spec = rc.model3();
        const std::size_t tau_node = rc.grid.index_of(tau);
        const double t1 = rc.grid.node(tau_node / 2);
        const double t2 = rc.grid.node((3 * tau_node) / 4);
        auto prelim = mme_log_ratio(path.x, rc.grid, t1, t2, spec.eps, spec.theta,
                                    rc.estimation.derivative_floor);
        auto os = one_step_iii(spec, path, prelim, tau, rc.grid, rc.estimation.fisher_floor);
        std::vector<double> t(os.value.size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = rc.grid.node(os.start + i);
        std::ofstream outf(file, std::ios::binary);
        outf << "t,theta_star,fisher_emp\n";
        outf << "# y0=" << format_double(path.y0)
             << ",seed=" << rc.experiment.master_seed
             << ",informative=" << (os.informative ? 1 : 0) << "\n";
        for (std::size_t i = 0; i < t.size(); ++i)
            outf << format_double(t[i]) << ',' << format_double(os.value[i]) << ','
                 << format_double(os.fisher[i]) << "\n";
    }
    std::printf("estimate: wrote %s\n", file.c_str());
    return 0;
}

int cmd_adaptive(const GlobalOpts& g, const std::string& paths_in) {
    RunConfig rc = load(g);
    ensure_valid(rc);
    PathPair path = paths_in.empty() ? simulate_from_config(rc, 0) : read_path_csv(paths_in);
    if (!(path.grid == rc.grid)) throw std::runtime_error("paths file grid does not match config");
    auto dx = path.x_increments();
    const double tau = rc.grid.node(rc.grid.ceil_index(rc.default_tau()));

    AdaptiveTrace ad;
    std::vector<double> oracle(rc.grid.n_nodes(), 0.0);
    double eps = 0.0;
    if (rc.kind == "det_init") {
        const auto& spec = rc.model1();
        eps = spec.eps;
        auto setup = Model1Setup::build(spec, rc.grid);
        auto obs = observation_part(setup.ric, setup.cg, dx);
        auto est = mle_recurrent(setup, obs, dx, rc.grid.index_of(tau), spec.theta);
        ad = adaptive_filter_i(setup, obs, est);
        for (std::size_t k = 0; k < oracle.size(); ++k)
            oracle[k] = spec.theta_true * obs.phi0[k] + obs.h[k];
    } else if (rc.kind == "joint") {
        const auto& spec = rc.model2();
        eps = spec.eps;
        auto prelim = preliminary_pair(path.x, spec, tau, rc.grid, spec.eps);
        auto os = one_step_process(spec, path, prelim, tau, rc.grid, rc.estimation.det_floor);
        const double tau_star = rc.grid.node(rc.grid.ceil_index(rc.default_tau_star()));
        ad = adaptive_filter_ii(spec, path, os, tau_star, rc.grid);
        auto ric = solve_riccati(spec, spec.theta2_true, rc.grid);
        auto ft = kb_filter(spec, spec.theta1_true, spec.theta2_true, path, ric);
        oracle = ft.m;
    } else {
        const auto& spec = rc.model3();
        eps = spec.eps;
        const std::size_t tau_node = rc.grid.index_of(tau);
        const double t1 = rc.grid.node(tau_node / 2);
        const double t2 = rc.grid.node((3 * tau_node) / 4);
        auto prelim = mme_log_ratio(path.x, rc.grid, t1, t2, spec.eps, spec.theta,
                                    rc.estimation.derivative_floor);
        auto os = one_step_iii(spec, path, prelim, tau, rc.grid, rc.estimation.fisher_floor);
        ad = adaptive_filter_iii(spec, path, os, tau, rc.grid);
        oracle = filter_sensitivity_iii(spec, spec.theta_true, dx, tau, rc.grid).m;
    }

    auto es = error_process(ad, oracle, eps, rc.grid);
    std::vector<double> t(ad.m.size()), om(ad.m.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = rc.grid.node(ad.start + i);
        om[i] = oracle[ad.start + i];
    }
    std::string file = rc.output.dir + "/adaptive.csv";
    write_csv(file, {"t", "m_adaptive", "m_oracle", "err_normalized"}, {t, ad.m, om, es.trace});
    std::printf("adaptive: wrote %s (sup normalized error %.6g)\n", file.c_str(), es.sup);
    return 0;
}

int cmd_experiment(const GlobalOpts& g) {
    RunConfig rc = load(g);
    ExperimentPlan plan = rc.experiment;
    if (plan.checks.empty()) throw std::runtime_error("experiment: config lists no checks");
    auto report = run_experiment(plan);

    std::string file = rc.output.dir + "/report.json";
    {
        std::ofstream out(file, std::ios::binary);
        out << report.to_json().dump(2) << "\n";
    }
    for (const auto& c : report.checks) {
        std::printf("%-32s %s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL");
        for (const auto& l : c.lines) std::printf("%s\n", l.c_str());
        if (!c.table.empty() && rc.output.csv) {
            std::string tf = rc.output.dir + "/check_" + c.name + ".csv";
            std::ofstream out(tf, std::ios::binary);
            for (const auto& row : c.table) {
                for (std::size_t i = 0; i < row.size(); ++i)
                    out << row[i] << (i + 1 < row.size() ? "," : "\n");
            }
        }
    }
    std::printf("experiment: wrote %s\n", file.c_str());
    return report.all_pass() ? 0 : 1;
}

int cmd_report(const std::string& report_in, const std::string& svg_csv,
               const std::string& out_dir) {
    std::ifstream in(report_in);
    if (!in) throw std::runtime_error("report: cannot open " + report_in);
    auto doc = nlohmann::json::parse(in);
    bool all = true;
    for (const auto& c : doc["checks"]) {
        bool pass = c["pass"].get<bool>();
        all = all && pass;
        std::printf("%-32s %s\n", c["name"].get<std::string>().c_str(), pass ? "PASS" : "FAIL");
    }
    if (!svg_csv.empty()) {
        std::ifstream csv(svg_csv);
        if (!csv) throw std::runtime_error("report: cannot open " + svg_csv);
        std::string line;
        std::getline(csv, line);
        std::vector<std::string> names;
        std::stringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) names.push_back(cell);
        std::vector<std::vector<double>> cols(names.size());
        while (std::getline(csv, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::stringstream ls(line);
            for (std::size_t c = 0; c < names.size(); ++c) {
                std::getline(ls, cell, ',');
                cols[c].push_back(std::stod(cell));
            }
        }
        fs::create_directories(out_dir);
        std::string out = out_dir + "/" + fs::path(svg_csv).stem().string() + ".svg";
        std::ofstream sv(out, std::ios::binary);
        sv << svg_line_chart(names, cols);
        std::printf("report: wrote %s\n", out.c_str());
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive filtering for partially observed linear systems with unknown initial values"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config, "JSON run configuration")->check(CLI::ExistingFile);
    std::uint64_t seed_val = 0;
    auto* seed_opt = app.add_option("--seed", seed_val, "master seed override");
    app.add_option("--out", g.out, "output directory override");
    app.add_option("--workers", g.workers, "worker thread count");
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "json"}));

    std::string paths_in, report_in, svg_csv;
    auto* sim = app.add_subcommand("simulate", "simulate one observation/hidden path pair");
    auto* fil = app.add_subcommand("filter", "run the mean filter at the configured true value");
    fil->add_option("--paths-in", paths_in, "paths CSV from a previous simulate run");
    auto* est = app.add_subcommand("estimate", "run the estimator process");
    est->add_option("--paths-in", paths_in, "paths CSV from a previous simulate run");
    auto* ada = app.add_subcommand("adaptive", "run the adaptive filter and compare to the oracle");
    ada->add_option("--paths-in", paths_in, "paths CSV from a previous simulate run");
    auto* exp = app.add_subcommand("experiment", "run the configured experiment plan");
    auto* rep = app.add_subcommand("report", "summarize a report.json; optionally chart a CSV");
    rep->add_option("--in", report_in, "report.json path")->required();
    rep->add_option("--svg", svg_csv, "trace CSV to render as SVG");

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) g.seed = seed_val;

    try {
        if (*sim) return cmd_simulate(g);
        if (*fil) return cmd_filter(g, paths_in);
        if (*est) return cmd_estimate(g, paths_in);
        if (*ada) return cmd_adaptive(g, paths_in);
        if (*exp) return cmd_experiment(g);
        if (*rep) return cmd_report(report_in, svg_csv, g.out.empty() ? "." : g.out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
