// slowbond: experiment runner for the slow-bond exclusion-process toolkit.
// Exit codes: 0 all verdicts pass, 1 any verdict fails, 2 usage/config error.
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "slowbond/harness.hpp"

using namespace slowbond;

namespace {

struct CommonOpts {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int replicas = 0;
    std::string out_dir = ".";
    std::string format = "csv";
    double budget = 0.0;
    bool budget_set = false;
};

ExperimentConfig load_with_overrides(const CommonOpts& opts) {
    ExperimentConfig cfg = load_config(opts.config_path);
    if (opts.seed_set) cfg.seed = opts.seed;
    if (opts.replicas > 0) cfg.replicas = opts.replicas;
    if (opts.budget_set) cfg.budget_events = opts.budget;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"slow-bond exclusion process: simulation and limit-theorem checks"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto add_common = [&](CLI::App* cmd, bool with_run_flags) {
        cmd->add_option("config", opts.config_path, "experiment config file")->required();
        cmd->add_option("--seed", opts.seed, "override run.seed")
            ->each([&](const std::string&) { opts.seed_set = true; });
        cmd->add_option("--replicas", opts.replicas, "override run.replicas");
        cmd->add_option("--budget-events", opts.budget, "override budget.events")
            ->each([&](const std::string&) { opts.budget_set = true; });
        if (with_run_flags) {
            cmd->add_option("--out-dir", opts.out_dir, "output directory");
            cmd->add_option("--format", opts.format, "report format: csv|json|both")
                ->check(CLI::IsMember({"csv", "json", "both"}));
        }
    };

    auto* run_cmd = app.add_subcommand("run", "run an experiment and emit a report");
    add_common(run_cmd, true);
    auto* validate_cmd = app.add_subcommand("validate", "validate a config");
    add_common(validate_cmd, false);
    auto* cost_cmd = app.add_subcommand("cost", "print the event-count estimate");
    add_common(cost_cmd, false);
    auto* presets_cmd =
        app.add_subcommand("presets", "list test-function presets and shipped configs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (presets_cmd->parsed()) {
            std::cout << "test-function presets:\n";
            for (const auto& name : preset_names()) std::cout << "  " << name << "\n";
            std::cout << "example configs: see the configs/ directory of the source tree\n";
            return 0;
        }
        if (validate_cmd->parsed()) {
            validate_config(load_with_overrides(opts));
            std::cout << "config ok\n";
            return 0;
        }
        if (cost_cmd->parsed()) {
            const auto cfg = load_with_overrides(opts);
            std::printf("estimated events: %.3e (budget %.3e)\n", estimated_cost(cfg),
                        cfg.budget_events);
            return 0;
        }
        // run
        const auto cfg = load_with_overrides(opts);
        const Report report = run_experiment(cfg);
        const auto files = emit_report(report, opts.out_dir, opts.format);
        for (const auto& r : report.rows) {
            if (r.verdict == "info") continue;
            std::printf("[%s] n=%d L=%d t=%g eps=%g estimate=%.6g predictor=%.6g\n",
                        r.verdict == "pass" ? "PASS" : "FAIL", r.n, r.L, r.t, r.eps,
                        r.estimate, r.predictor);
        }
        for (const auto& f : files) std::cout << "wrote " << f << "\n";
        std::printf("%s: %s in %.1f s (%.3g events)\n", cfg.kind.c_str(),
                    report.pass ? "all verdicts pass" : "verdict failure",
                    report.runtime_seconds, report.events);
        return report.pass ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
