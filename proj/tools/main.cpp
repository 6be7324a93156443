// eqflow: exact equatorial azimuthal flows and their free surface.
//
//   eqflow baseline --config run.yaml [--preset desk] [--out DIR]
//   eqflow fields   --config run.yaml
//   eqflow respond  --config run.yaml --pressure P.csv
//   eqflow verify   --config run.yaml

#include "config.hpp"
#include "workflows.hpp"

#include "eqflow/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace eqflow;
using namespace eqflow::cli;

int main(int argc, char** argv) {
    CLI::App app{"Exact equatorial azimuthal flows: pressure, free surface and self-checks"};
    app.require_subcommand(1);

    std::string config_path, out_dir, preset, pressure_path;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "YAML run configuration")->required();
        sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
        std::string names;
        for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
        sub->add_option("--preset", preset, "built-in parameter set applied before the config (" + names + ")");
    };
    auto* baseline = app.add_subcommand("baseline", "surface pressure P0 that keeps the undisturbed surface");
    auto* fields = app.add_subcommand("fields", "velocity and pressure fields with Euler residuals");
    auto* respond = app.add_subcommand("respond", "free surface produced by a given surface pressure");
    auto* verify = app.add_subcommand("verify", "run every cross-check and report pass/fail");
    for (auto* s : {baseline, fields, respond, verify}) add_common(s);
    respond->add_option("--pressure", pressure_path, "CSV with columns theta, P")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        RunConfig cfg = load_config(config_path, preset);
        if (!out_dir.empty()) cfg.output.directory = out_dir;
        if (baseline->parsed()) return run_baseline(cfg, std::cout);
        if (fields->parsed()) return run_fields(cfg, std::cout);
        if (respond->parsed()) return run_respond(cfg, pressure_path, std::cout);
        return run_verify(cfg, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const StiffnessError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return kStiffness;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
}
