#pragma once

#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "akf/grid.hpp"
#include "akf/mc.hpp"
#include "akf/model.hpp"

namespace akf {

// One human-editable JSON document per run. Unknown keys are rejected so a
// typo cannot silently change an experiment.
struct EstimationConfig {
    double tau = 0.0;        // 0 = model default (0.05 T, 0.2 T, 0.1 T)
    double tau_star = 0.0;   // 0 = 1.5 tau (two-parameter model)
    double fisher_floor = 1e-12;
    double derivative_floor = 1e-12;
    double det_floor = 1e-10;
};

struct OutputConfig {
    std::string dir = ".";
    bool csv = true;
    bool json = false;
};

struct RunConfig {
    std::string kind;  // det_init | joint | random_init
    std::variant<ModelSpecI, ModelSpecII, ModelSpecIII> model;
    TimeGrid grid;
    EstimationConfig estimation;
    ExperimentPlan experiment;      // checks may be empty for non-experiment commands
    OutputConfig output;

    const ModelSpecI& model1() const { return std::get<ModelSpecI>(model); }
    const ModelSpecII& model2() const { return std::get<ModelSpecII>(model); }
    const ModelSpecIII& model3() const { return std::get<ModelSpecIII>(model); }

    double default_tau() const;     // estimation.tau or the model default
    double default_tau_star() const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const nlohmann::json& doc);

}  // namespace akf
