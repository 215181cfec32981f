#include "akf/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace akf {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw std::invalid_argument("config: " + where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
}

double num(const json& obj, const std::string& key) {
    if (!obj.contains(key)) throw std::invalid_argument("config: missing key '" + key + "'");
    if (!obj[key].is_number()) throw std::invalid_argument("config: '" + key + "' must be a number");
    return obj[key].get<double>();
}

double num_or(const json& obj, const std::string& key, double dflt) {
    return obj.contains(key) ? num(obj, key) : dflt;
}

Coefficient parse_coefficient(const json& c, const std::string& where) {
    if (c.is_number()) return Coefficient::constant(c.get<double>());
    require_keys(c, where, {"type", "value", "t", "v", "coeffs", "scale", "rate", "floor"});
    if (!c.contains("type")) throw std::invalid_argument("config: coefficient " + where + " needs a type");
    std::string type = c["type"].get<std::string>();
    Coefficient out;
    if (type == "constant") {
        out = Coefficient::constant(num(c, "value"));
    } else if (type == "table") {
        out = Coefficient::table(c.at("t").get<std::vector<double>>(),
                                 c.at("v").get<std::vector<double>>());
    } else if (type == "poly") {
        out = Coefficient::polynomial(c.at("coeffs").get<std::vector<double>>());
    } else if (type == "exp") {
        out = Coefficient::exponential(num(c, "scale"), num(c, "rate"));
    } else {
        throw std::invalid_argument("config: unknown coefficient type '" + type + "' in " + where);
    }
    if (c.contains("floor")) out.declared_floor = num(c, "floor");
    return out;
}

Interval parse_interval(const json& j, const std::string& where) {
    require_keys(j, where, {"lo", "hi"});
    Interval iv{num(j, "lo"), num(j, "hi")};
    if (!(iv.lo < iv.hi)) throw std::invalid_argument("config: empty interval in " + where);
    return iv;
}

}  // namespace

double RunConfig::default_tau() const {
    if (estimation.tau > 0.0) return estimation.tau;
    if (kind == "det_init") return 0.05 * grid.horizon;
    if (kind == "joint") return 0.2 * grid.horizon;
    return 0.1 * grid.horizon;
}

double RunConfig::default_tau_star() const {
    if (estimation.tau_star > 0.0) return estimation.tau_star;
    return 1.5 * default_tau();
}

RunConfig parse_config(const nlohmann::json& doc) {
    require_keys(doc, "top level", {"model", "grid", "estimation", "experiment", "output"});
    if (!doc.contains("model") || !doc.contains("grid"))
        throw std::invalid_argument("config: model and grid blocks are required");

    RunConfig rc;
    const json& g = doc["grid"];
    require_keys(g, "grid", {"T", "N"});
    rc.grid = TimeGrid(num(g, "T"), static_cast<std::size_t>(num(g, "N")));

    const json& m = doc["model"];
    if (!m.contains("kind")) throw std::invalid_argument("config: model.kind is required");
    rc.kind = m["kind"].get<std::string>();
    if (rc.kind == "det_init") {
        require_keys(m, "model", {"kind", "f", "sigma", "a", "b", "eps", "theta"});
        ModelSpecI spec;
        spec.f = parse_coefficient(m.at("f"), "f");
        spec.sigma = parse_coefficient(m.at("sigma"), "sigma");
        spec.a = parse_coefficient(m.at("a"), "a");
        spec.b = parse_coefficient(m.at("b"), "b");
        spec.eps = num(m, "eps");
        const json& th = m.at("theta");
        require_keys(th, "theta", {"lo", "hi", "true"});
        spec.theta = Interval{num(th, "lo"), num(th, "hi")};
        spec.theta_true = num(th, "true");
        rc.model = spec;
    } else if (rc.kind == "joint") {
        require_keys(m, "model", {"kind", "f", "sigma", "b", "drift", "eps", "theta1", "theta2"});
        ModelSpecII spec;
        spec.f = parse_coefficient(m.at("f"), "f");
        spec.sigma = parse_coefficient(m.at("sigma"), "sigma");
        spec.b = parse_coefficient(m.at("b"), "b");
        const json& d = m.at("drift");
        require_keys(d, "drift", {"g", "h"});
        spec.drift.g = d.contains("g") ? parse_coefficient(d.at("g"), "drift.g")
                                       : Coefficient::constant(1.0);
        spec.drift.h = d.contains("h") ? parse_coefficient(d.at("h"), "drift.h")
                                       : Coefficient::constant(0.0);
        spec.eps = num(m, "eps");
        const json& t1 = m.at("theta1");
        require_keys(t1, "theta1", {"lo", "hi", "true"});
        spec.theta1 = Interval{num(t1, "lo"), num(t1, "hi")};
        spec.theta1_true = num(t1, "true");
        const json& t2 = m.at("theta2");
        require_keys(t2, "theta2", {"lo", "hi", "true"});
        spec.theta2 = Interval{num(t2, "lo"), num(t2, "hi")};
        spec.theta2_true = num(t2, "true");
        rc.model = spec;
    } else if (rc.kind == "random_init") {
        require_keys(m, "model", {"kind", "f", "sigma", "b", "d2", "eps", "theta"});
        ModelSpecIII spec;
        spec.f = num(m, "f");
        spec.sigma = num(m, "sigma");
        spec.b = num(m, "b");
        spec.d2 = num(m, "d2");
        spec.eps = num(m, "eps");
        const json& th = m.at("theta");
        require_keys(th, "theta", {"lo", "hi", "true"});
        spec.theta = Interval{num(th, "lo"), num(th, "hi")};
        spec.theta_true = num(th, "true");
        rc.model = spec;
    } else {
        throw std::invalid_argument("config: model.kind must be det_init, joint or random_init");
    }

    if (doc.contains("estimation")) {
        const json& e = doc["estimation"];
        require_keys(e, "estimation",
                     {"tau", "tau_star", "fisher_floor", "derivative_floor", "det_floor"});
        rc.estimation.tau = num_or(e, "tau", 0.0);
        rc.estimation.tau_star = num_or(e, "tau_star", 0.0);
        rc.estimation.fisher_floor = num_or(e, "fisher_floor", 1e-12);
        rc.estimation.derivative_floor = num_or(e, "derivative_floor", 1e-12);
        rc.estimation.det_floor = num_or(e, "det_floor", 1e-10);
    }

    if (doc.contains("experiment")) {
        const json& x = doc["experiment"];
        require_keys(x, "experiment", {"checks", "master_seed", "workers", "replicates"});
        if (x.contains("checks")) {
            rc.experiment.checks = x["checks"].get<std::vector<std::string>>();
            for (const auto& c : rc.experiment.checks)
                if (!is_check(c))
                    throw std::invalid_argument("config: unknown check '" + c + "'");
        }
        if (x.contains("master_seed"))
            rc.experiment.master_seed = x["master_seed"].get<std::uint64_t>();
        if (x.contains("workers")) rc.experiment.workers = x["workers"].get<int>();
        if (x.contains("replicates")) {
            double r = num(x, "replicates");
            if (!(r > 0)) throw std::invalid_argument("config: experiment.replicates must be positive");
            rc.experiment.replicates_override = static_cast<std::size_t>(r);
        }
    }

    if (doc.contains("output")) {
        const json& o = doc["output"];
        require_keys(o, "output", {"dir", "formats"});
        if (o.contains("dir")) rc.output.dir = o["dir"].get<std::string>();
        if (o.contains("formats")) {
            rc.output.csv = false;
            rc.output.json = false;
            for (const auto& f : o["formats"]) {
                std::string s = f.get<std::string>();
                if (s == "csv")
                    rc.output.csv = true;
                else if (s == "json")
                    rc.output.json = true;
                else
                    throw std::invalid_argument("config: unknown output format '" + s + "'");
            }
        }
    }
    return rc;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    nlohmann::json doc = nlohmann::json::parse(in);
    return parse_config(doc);
}

}  // namespace akf
