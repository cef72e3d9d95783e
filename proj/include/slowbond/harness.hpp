// harness.hpp
// Experiment runner: flat key-value configs, named test-function presets,
// event-budget gating, deterministic replica farms, and machine-readable
// reports (CSV rows + JSON manifest).
#pragma once

#include <map>
#include <string>
#include <vector>

#include "slowbond/params.hpp"
#include "slowbond/test_function.hpp"

namespace slowbond {

struct ExperimentConfig {
    std::string kind;  // invariance | qv | covariance | crossover-scan |
                       // bg-scan | energy | pair-decay
    ModelParams model;
    int lattice_factor = 8;
    double t = 0.25;
    int replicas = 200;
    std::uint64_t seed = 1;
    double tail_tol = 1e-5;
    double budget_events = 5e9;
    std::vector<int> grid_n;
    std::vector<int> grid_L;
    std::vector<double> grid_eps;
    std::vector<double> grid_t;
    std::string phi = "gauss";
    std::string psi = "gauss-shift";
};

// "section.key = value" lines, '#' comments; unknown keys are errors
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// canonical text form; parse(emit(parse(x))) == parse(x)
std::string emit_config(const ExperimentConfig& cfg);

// named test functions; Robin presets are smoothed with the model's alpha
std::vector<std::string> preset_names();
TestFunction preset_test_function(const std::string& name, const ModelParams& model);

// throws std::invalid_argument with the reason; includes the budget gate
void validate_config(const ExperimentConfig& cfg);
// total dominating-clock ticks across the whole grid
double estimated_cost(const ExperimentConfig& cfg);

struct ReportRow {
    int n = 0;
    int L = 0;
    double t = 0.0;
    double eps = 0.0;
    double estimate = 0.0;
    double stderr_est = 0.0;
    double predictor = 0.0;
    double ratio = 0.0;
    std::string verdict;  // pass | fail | info
};

struct Report {
    ExperimentConfig config;
    std::vector<ReportRow> rows;
    std::vector<std::string> rules;  // the acceptance rule each verdict cites
    std::map<std::string, double> fitted;
    bool pass = false;
    double events = 0.0;
    double runtime_seconds = 0.0;  // printed only, never serialized
};

Report run_experiment(const ExperimentConfig& cfg);

// writes report.csv and/or report.json into out_dir; format is "csv",
// "json" or "both"; files are byte-identical across reruns of a fixed seed
std::vector<std::string> emit_report(const Report& report, const std::string& out_dir,
                                     const std::string& format);

std::string report_csv(const Report& report);
std::string report_json(const Report& report);

inline constexpr const char* kVersion = "slowbond 0.1.0";

}  // namespace slowbond
