#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "resolab/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"resolab: scattering-resonance laboratory for smooth planar "
                 "obstacles"};
    std::string experiment, config_path, out_dir;
    long long seed = -1;
    app.add_option("experiment", experiment,
                   "one of: disk, sphere, bie, split, stability, sweep")
        ->required();
    app.add_option("--config", config_path, "experiment config JSON")->required();
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--seed", seed, "random seed (overrides config)");
    CLI11_PARSE(app, argc, argv);

    if (const char* cap = std::getenv("RESOLAB_THREADS")) {
        int n = std::atoi(cap);
        if (n >= 1) Eigen::setNbThreads(n);
    }

    try {
        resolab::ExperimentKind kind = resolab::parse_experiment_kind(experiment);
        resolab::ExperimentConfig cfg = resolab::load_config(config_path);
        cfg.kind = kind; // the positional argument selects the experiment
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        resolab::run_experiment(cfg);
    } catch (const resolab::StabilityViolation& e) {
        std::cerr << "stability violation: " << e.what() << "\n";
        return 3;
    } catch (const resolab::PreflightError& e) {
        std::cerr << "preflight failure: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "preflight failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
