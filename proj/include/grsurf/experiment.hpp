#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grsurf/io.hpp"

namespace grsurf {

/// Exit codes of the command-line driver.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 2,
    kExitNumericalError = 3,
    kExitVerifyFailed = 4,
};

/// One experiment: a solution source, a lattice, the requested analyses and
/// verification tolerances. Parsed from a JSON document; command-line flags
/// override the grid, seed and output directory.
struct ExperimentConfig {
    int n = 2;
    int m = 1;
    json solution;                       // solution subtree, see parse_solution
    LightConeGrid grid{0.0, 0.0, 1.0 / 16.0, 1.0 / 16.0, 17, 17};
    std::vector<std::pair<int, int>> refinements; // extra (nL,nR) for convergence tables
    int basepoint_i = 0;
    int basepoint_j = 0;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::vector<std::string> analyses = {"verify"};
    NormalPolicy frame_policy = NormalPolicy::TangentAnchored;
    std::uint64_t frame_seed = 0;
    json tolerances = json::object();    // optional per-check thresholds

    bool wants(const std::string& analysis) const;
};

/// Parses and validates a config document; throws ConfigError on any problem.
ExperimentConfig parse_config(const json& doc);

/// Resolved config back to JSON (recorded in the manifest for reproducibility).
json config_to_json(const ExperimentConfig& cfg);

/// Builds the analytic catalog entry described by the solution subtree.
/// Goursat-type solutions are handled inside run_experiment instead.
AnalyticSolution parse_solution(const json& sol, int n, int m);

struct ExperimentResult {
    int exit_code = kExitOk;
    json report;
    std::vector<WrittenFile> files;
};

/// Runs the configured analyses, writes every artifact plus manifest.json and
/// report.json under cfg.out_dir, and returns the report. Throws ConfigError /
/// NumericalError for exit codes 2 / 3; verify failures return kExitVerifyFailed.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

} // namespace grsurf
