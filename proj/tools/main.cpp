#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dynrb/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Dynamic topology optimization with reduced-basis adjoint sensitivities"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    bool have_seed = false, force = false;
    int probes = 10;
    double fd_step = 1e-6;
    std::vector<std::string> report_dirs;
    std::string report_out = "report";

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file")->required();
        cmd->add_option("--out", out_dir, "output directory override");
        cmd->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
            have_seed = true;
        });
        cmd->add_flag("--force", force, "overwrite existing artifacts");
    };

    CLI::App* forward = app.add_subcommand("forward", "run the transient analysis");
    add_common(forward);
    CLI::App* gradcheck =
        app.add_subcommand("gradcheck", "verify the adjoint gradient against central differences");
    add_common(gradcheck);
    gradcheck->add_option("--probes", probes, "number of probed elements");
    gradcheck->add_option("--fd-step", fd_step, "central difference step");
    CLI::App* offline = app.add_subcommand("offline", "build the reduced basis and error model");
    add_common(offline);
    CLI::App* optimize = app.add_subcommand("optimize", "run the optimization loop");
    add_common(optimize);
    CLI::App* report = app.add_subcommand("report", "render SVG plots from artifacts");
    report->add_option("dirs", report_dirs, "artifact directories")->required();
    report->add_option("--out", report_out, "plot output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (report->parsed()) {
            dynrb::cmd_report(report_dirs, report_out);
            return 0;
        }

        dynrb::RunConfig config = dynrb::load_config_file(config_path);
        dynrb::CliOverrides cli;
        if (!out_dir.empty()) cli.out_dir = out_dir;
        if (have_seed) cli.seed = seed;
        cli.force = force;

        if (forward->parsed()) {
            dynrb::cmd_forward(config, cli);
        } else if (gradcheck->parsed()) {
            if (!dynrb::cmd_gradcheck(config, probes, fd_step, cli)) return 1;
        } else if (offline->parsed()) {
            dynrb::cmd_offline(config, cli);
        } else if (optimize->parsed()) {
            dynrb::cmd_optimize(config, cli);
        }
        return 0;
    } catch (const dynrb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
