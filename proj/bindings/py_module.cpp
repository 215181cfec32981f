// Python bindings for the main operations: simulation, filtering, the three
// estimator stacks, adaptive filters and the experiment runner. Thin
// dict-in/dict-out wrappers over the core library.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "akf/adaptive.hpp"
#include "akf/config.hpp"
#include "akf/estim1.hpp"
#include "akf/estim2.hpp"
#include "akf/estim3.hpp"
#include "akf/mc.hpp"
#include "akf/oracle.hpp"
#include "akf/stats.hpp"

namespace py = pybind11;
using namespace akf;

namespace {

RunConfig config_from_json_str(const std::string& text) {
    return parse_config(nlohmann::json::parse(text));
}

py::dict path_to_dict(const PathPair& p) {
    std::vector<double> t(p.grid.n_nodes());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = p.grid.node(k);
    py::dict d;
    d["t"] = t;
    d["x"] = p.x;
    d["y"] = p.y;
    d["dw"] = p.dw;
    d["dv"] = p.dv;
    d["y0"] = p.y0;
    return d;
}

PathPair simulate_cfg(const RunConfig& rc, std::uint64_t replicate) {
    SeedPolicy seeds{rc.experiment.master_seed};
    if (rc.kind == "det_init") return simulate_pair(rc.model1(), rc.grid, seeds, replicate);
    if (rc.kind == "joint") return simulate_pair(rc.model2(), rc.grid, seeds, replicate);
    return simulate_pair(rc.model3(), rc.grid, seeds, replicate);
}

PathPair path_from_x(const RunConfig& rc, const std::vector<double>& x) {
    if (x.size() != rc.grid.n_nodes())
        throw std::invalid_argument("x must have N+1 node values");
    PathPair p;
    p.grid = rc.grid;
    p.x = x;
    p.y.assign(x.size(), 0.0);
    p.dw.assign(rc.grid.steps, 0.0);
    p.dv.assign(rc.grid.steps, 0.0);
    return p;
}

}  // namespace

PYBIND11_MODULE(_akf, m) {
    m.doc() = "adaptive filtering for partially observed linear systems "
              "with unknown initial values";

    m.def("validate", [](const std::string& cfg_json) {
        auto rc = config_from_json_str(cfg_json);
        ValidationReport rep;
        if (rc.kind == "det_init")
            rep = validate_model(rc.model1(), rc.grid);
        else if (rc.kind == "joint")
            rep = validate_model(rc.model2(), rc.grid);
        else
            rep = validate_model(rc.model3(), rc.grid);
        py::dict d;
        d["ok"] = rep.ok();
        d["violations"] = rep.violations;
        d["verified"] = rep.verified;
        return d;
    }, py::arg("config_json"), "Validate the model block of a JSON config.");

    m.def("simulate", [](const std::string& cfg_json, std::uint64_t replicate) {
        auto rc = config_from_json_str(cfg_json);
        return path_to_dict(simulate_cfg(rc, replicate));
    }, py::arg("config_json"), py::arg("replicate") = 0,
       "Simulate one observation/hidden path pair.");

    m.def("riccati_closed_form", &riccati_closed_form,
          py::arg("theta"), py::arg("f"), py::arg("sigma"), py::arg("b"),
          py::arg("d2"), py::arg("eps"), py::arg("t"));
    m.def("gamma_star_limit", &gamma_star_limit,
          py::arg("theta"), py::arg("f"), py::arg("sigma"), py::arg("b"), py::arg("t"));

    m.def("kb_filter", [](const std::string& cfg_json, const std::vector<double>& x) {
        auto rc = config_from_json_str(cfg_json);
        auto p = path_from_x(rc, x);
        auto dx = p.x_increments();
        py::dict d;
        if (rc.kind == "det_init") {
            auto setup = Model1Setup::build(rc.model1(), rc.grid);
            auto ft = kb_filter(setup.ric, setup.cg, rc.model1().theta_true, dx);
            d["m"] = ft.m;
            d["phi0"] = ft.phi0;
            d["h"] = ft.h;
            d["gamma"] = setup.ric.gamma;
        } else if (rc.kind == "joint") {
            const auto& spec = rc.model2();
            auto ric = solve_riccati(spec, spec.theta2_true, rc.grid);
            auto cg = CoefficientGrid::sample(spec, spec.theta2_true, rc.grid);
            auto ft = kb_filter(ric, cg, spec.theta1_true, dx);
            d["m"] = ft.m;
            d["phi0"] = ft.phi0;
            d["h"] = ft.h;
            d["gamma"] = ric.gamma;
        } else {
            const auto& spec = rc.model3();
            const double tau = rc.grid.node(rc.grid.ceil_index(rc.default_tau()));
            auto mf = filter_sensitivity_iii(spec, spec.theta_true, dx, tau, rc.grid);
            d["m"] = mf.m;
            d["mdot"] = mf.mdot;
            d["fisher_emp"] = mf.fisher_emp;
        }
        return d;
    }, py::arg("config_json"), py::arg("x"),
       "Run the mean filter at the configured true parameter on a path.");

    m.def("estimate", [](const std::string& cfg_json, const std::vector<double>& x) {
        auto rc = config_from_json_str(cfg_json);
        auto p = path_from_x(rc, x);
        auto dx = p.x_increments();
        const double tau = rc.grid.node(rc.grid.ceil_index(rc.default_tau()));
        py::dict d;
        if (rc.kind == "det_init") {
            const auto& spec = rc.model1();
            auto setup = Model1Setup::build(spec, rc.grid);
            auto obs = observation_part(setup.ric, setup.cg, dx);
            auto tr = mle_recurrent(setup, obs, dx, rc.grid.index_of(tau), spec.theta);
            d["start_node"] = tr.start;
            d["value"] = tr.value;
            d["fisher"] = tr.fisher;
        } else if (rc.kind == "joint") {
            const auto& spec = rc.model2();
            auto prelim = preliminary_pair(p.x, spec, tau, rc.grid, spec.eps);
            auto os = one_step_process(spec, p, prelim, tau, rc.grid);
            d["start_node"] = os.start;
            d["theta1"] = os.th1;
            d["theta2"] = os.th2;
            d["preliminary"] = py::make_tuple(prelim.theta1, prelim.theta2);
        } else {
            const auto& spec = rc.model3();
            const std::size_t tn = rc.grid.index_of(tau);
            auto prelim = mme_log_ratio(p.x, rc.grid, rc.grid.node(tn / 2),
                                        rc.grid.node((3 * tn) / 4), spec.eps, spec.theta);
            auto os = one_step_iii(spec, p, prelim, tau, rc.grid);
            d["start_node"] = os.start;
            d["value"] = os.value;
            d["fisher"] = os.fisher;
            d["informative"] = os.informative;
            d["preliminary"] = os.preliminary;
        }
        return d;
    }, py::arg("config_json"), py::arg("x"),
       "Run the estimator process for the configured model on a path.");

    m.def("adaptive_filter", [](const std::string& cfg_json, const std::vector<double>& x) {
        auto rc = config_from_json_str(cfg_json);
        auto p = path_from_x(rc, x);
        auto dx = p.x_increments();
        const double tau = rc.grid.node(rc.grid.ceil_index(rc.default_tau()));
        py::dict d;
        if (rc.kind == "det_init") {
            const auto& spec = rc.model1();
            auto setup = Model1Setup::build(spec, rc.grid);
            auto obs = observation_part(setup.ric, setup.cg, dx);
            auto est = mle_recurrent(setup, obs, dx, rc.grid.index_of(tau), spec.theta);
            auto ad = adaptive_filter_i(setup, obs, est);
            std::vector<double> oracle(rc.grid.n_nodes());
            for (std::size_t k = 0; k < oracle.size(); ++k)
                oracle[k] = spec.theta_true * obs.phi0[k] + obs.h[k];
            auto es = error_process(ad, oracle, spec.eps, rc.grid);
            d["start_node"] = ad.start;
            d["m"] = ad.m;
            d["err_normalized"] = es.trace;
        } else if (rc.kind == "joint") {
            const auto& spec = rc.model2();
            auto prelim = preliminary_pair(p.x, spec, tau, rc.grid, spec.eps);
            auto os = one_step_process(spec, p, prelim, tau, rc.grid);
            const double tau_star = rc.grid.node(rc.grid.ceil_index(rc.default_tau_star()));
            auto ad = adaptive_filter_ii(spec, p, os, tau_star, rc.grid);
            d["start_node"] = ad.start;
            d["m"] = ad.m;
            d["gamma"] = ad.gamma;
        } else {
            const auto& spec = rc.model3();
            const std::size_t tn = rc.grid.index_of(tau);
            auto prelim = mme_log_ratio(p.x, rc.grid, rc.grid.node(tn / 2),
                                        rc.grid.node((3 * tn) / 4), spec.eps, spec.theta);
            auto os = one_step_iii(spec, p, prelim, tau, rc.grid);
            auto ad = adaptive_filter_iii(spec, p, os, tau, rc.grid);
            d["start_node"] = ad.start;
            d["m"] = ad.m;
        }
        return d;
    }, py::arg("config_json"), py::arg("x"),
       "Run the adaptive filter for the configured model on a path.");

    m.def("discrete_oracle", [](const std::string& cfg_json, const std::vector<double>& x,
                                double prior_mean, double prior_var) {
        auto rc = config_from_json_str(cfg_json);
        auto p = path_from_x(rc, x);
        CoefficientGrid cg;
        double eps = 0.0;
        if (rc.kind == "det_init") {
            cg = CoefficientGrid::sample(rc.model1(), rc.grid);
            eps = rc.model1().eps;
        } else if (rc.kind == "joint") {
            cg = CoefficientGrid::sample(rc.model2(), rc.model2().theta2_true, rc.grid);
            eps = rc.model2().eps;
        } else {
            cg = CoefficientGrid::sample(rc.model3(), rc.model3().theta_true, rc.grid);
            eps = rc.model3().eps;
        }
        auto res = discrete_kalman(cg, rc.grid, eps, prior_mean, prior_var, p.x_increments());
        py::dict d;
        d["mean"] = res.mean;
        d["var"] = res.var;
        return d;
    }, py::arg("config_json"), py::arg("x"), py::arg("prior_mean"), py::arg("prior_var"),
       "Exact Gaussian conditioning on the discretized model.");

    m.def("available_checks", &available_checks);

    m.def("run_experiment", [](const std::vector<std::string>& checks, std::uint64_t master_seed,
                               int workers, std::size_t replicates) {
        ExperimentPlan plan;
        plan.checks = checks;
        plan.master_seed = master_seed;
        plan.workers = workers;
        plan.replicates_override = replicates;
        return run_experiment(plan).to_json().dump();
    }, py::arg("checks"), py::arg("master_seed") = 20260810ULL, py::arg("workers") = 0,
       py::arg("replicates") = 0,
       "Run named checks; returns the report as a JSON string.");
}
