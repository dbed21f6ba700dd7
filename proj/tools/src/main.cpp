#include "commands.hpp"
#include "run_config.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace oseen::cli;

int main(int argc, char** argv)
{
    CLI::App app{"Stabilized equal-order solver for the perturbed Oseen problem"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> degree;
    std::optional<int> levels;
    std::optional<int> threads;

    const std::pair<Experiment, const char*> experiments[] = {
        {Experiment::Kovasznay, "Convergence study on the Kovasznay case"},
        {Experiment::BentRandom, "Pressure from random velocity data in a bent channel"},
        {Experiment::NsRecovery, "Navier-Stokes pressure recovery with a fine reference"},
        {Experiment::Check, "Numeric property suite"},
    };
    for (const auto& [e, help] : experiments) {
        CLI::App* sub = app.add_subcommand(std::string(to_string(e)), help);
        sub->add_option("--config", config_path, "Run configuration (key = value with [sections])")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out, "Output directory");
        sub->add_option("--seed", seed, "Random seed");
        sub->add_option("--degree", degree, "Polynomial degree k");
        sub->add_option("--levels", levels, "Number of refinement levels");
        sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    RunConfig config;
    try {
        config = load_config(config_path);
        if (to_string(config.experiment) != name) {
            throw ConfigError("config is for experiment '" + std::string(to_string(config.experiment)) +
                              "', not '" + name + "'");
        }
        if (out) {
            config.out = *out;
        }
        if (seed) {
            config.seed = *seed;
        }
        if (degree) {
            config.degree = *degree;
        }
        if (levels) {
            config.levels = *levels;
        }
        if (threads) {
            config.threads = *threads;
        }
        config.validate();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        return run_experiment(config, std::cout);
    } catch (const oseen::SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
