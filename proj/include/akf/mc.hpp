#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace akf {

// Parallel map over replicate indices. Workers only fill per-index slots;
// every reduction happens serially afterwards in index order, so the result
// is identical for any worker count.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

struct ExperimentPlan {
    std::vector<std::string> checks;
    std::uint64_t master_seed = 20260810ULL;
    int workers = 0;                    // 0 = hardware concurrency
    std::size_t replicates_override = 0;  // 0 = per-check default; smoke runs shrink it
};

struct CheckResult {
    std::string name;
    bool pass = false;
    nlohmann::json stats;                            // statistics/targets/tolerances
    std::vector<std::string> lines;                  // one line per sub-assertion
    std::vector<std::vector<std::string>> table;     // optional CSV rows, first row = header
};

struct ExperimentReport {
    std::vector<CheckResult> checks;
    std::uint64_t master_seed = 0;
    bool all_pass() const;
    nlohmann::json to_json() const;   // canonical content, no timing fields
};

// Named checks: the acceptance criteria plus calibration checks. Each check
// pins its own model constants and tolerances; the plan contributes the seed,
// worker count and an optional replicate override.
std::vector<std::string> available_checks();
bool is_check(const std::string& name);

ExperimentReport run_experiment(const ExperimentPlan& plan);

}  // namespace akf
