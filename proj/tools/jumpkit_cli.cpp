// jumpkit command-line runner: seeded, config-driven quantum-jump experiments
// with plot-ready CSV output.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "jumpkit/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"jumpkit: stochastic quantum-jump dynamics experiments"};
    app.set_version_flag("--version", std::string("jumpkit ") + jumpkit::kVersion);
    app.require_subcommand(1);

    std::string run_config, validate_config;
    CLI::App* run_cmd = app.add_subcommand("run", "run an experiment from a config file");
    run_cmd->add_option("config", run_config, "flat key = value config file")->required();
    CLI::App* validate_cmd = app.add_subcommand("validate", "schema-check a config without running");
    validate_cmd->add_option("config", validate_config, "flat key = value config file")->required();

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) return jumpkit::run(run_config);
    return jumpkit::validate(validate_config);
}
