#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "crossdiff/commands.hpp"
#include "crossdiff/errors.hpp"
#include "crossdiff/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Two-species cross-diffusion solver suite"};
    app.set_version_flag("--version", crossdiff::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    crossdiff::CommandOptions opts;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "configuration file")->required();
        cmd->add_option("--out", opts.out_dir, "output directory");
        cmd->add_option("--jobs", opts.jobs, "parallel sweep points");
    };

    CLI::App* equilibrium =
        app.add_subcommand("equilibrium", "stationary state via the constrained Newton solve");
    add_common(equilibrium);
    CLI::App* evolve = app.add_subcommand("evolve", "time integration of the full system");
    add_common(evolve);
    evolve->add_option("--stepper", opts.stepper_override, "mol or regularized");
    CLI::App* sweep = app.add_subcommand("sweep", "stationary-route comparison sweep");
    add_common(sweep);
    CLI::App* stability =
        app.add_subcommand("stability", "linear-stability spectrum about the stationary state");
    add_common(stability);

    CLI11_PARSE(app, argc, argv);

    crossdiff::RunConfig cfg;
    try {
        cfg = crossdiff::RunConfig::load_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    if (equilibrium->parsed()) return crossdiff::cmd_equilibrium(cfg, opts);
    if (evolve->parsed()) return crossdiff::cmd_evolve(cfg, opts);
    if (sweep->parsed()) return crossdiff::cmd_sweep(cfg, opts);
    if (stability->parsed()) return crossdiff::cmd_stability(cfg, opts);
    return 2;
}
