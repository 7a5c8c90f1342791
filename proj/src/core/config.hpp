#pragma once

#include <string>

#include "core/critical.hpp"
#include "core/dynamics.hpp"
#include "core/laguerre.hpp"
#include "core/limits.hpp"

namespace lagrg {

struct ExperimentConfig {
    int schema_version = 1;
    std::string command;  // orbit | find-critical | eigenvalues | limit | oracle-check
    LaguerreFactored seed;
    EvolutionParams params;
    HierarchyParams hierarchy;
    bool has_hierarchy = false;
    std::string variant = "Q";  // orbit: T|Q|Q_tilde; limit: abnormal|classical
    CriticalSearchOptions search;
    int kmax = 4;
    std::string out_dir = "results";
    unsigned long random_seed = 0;
};

// Strict JSON parse: unknown keys are rejected, all numeric fields are
// validated against the type invariants before dispatch.
ExperimentConfig parse_config(const std::string& json_text);

// The fully resolved configuration, as embedded in every output file.
std::string config_to_json(const ExperimentConfig& cfg);

// Dispatch the configured command and write its artifacts under cfg.out_dir.
// Returns the paths of the files written.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg);

}  // namespace lagrg
