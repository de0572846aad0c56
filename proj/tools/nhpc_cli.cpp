// Command-line front end: phi sweeps, the invariant verification suite and
// the preset catalog.
//
// Exit codes: 0 ok, 1 validation error, 2 numeric failure, 3 verification
// failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nhpc/nhpc.hpp"

namespace {

nhpc::RunConfig load_config(const std::string& config_path, const std::string& preset_name) {
    if (!preset_name.empty()) {
        const auto& table = nhpc::presets();
        auto it = table.find(preset_name);
        if (it == table.end())
            throw nhpc::ConfigError("--preset", "unknown preset \"" + preset_name + "\"");
        return it->second;
    }
    if (config_path.empty())
        throw nhpc::ConfigError("--config", "either --config or --preset is required");
    std::ifstream in(config_path);
    if (!in) throw nhpc::ConfigError("--config", "cannot open " + config_path);
    nhpc::json j;
    try {
        in >> j;
    } catch (const nhpc::json::exception& e) {
        throw nhpc::ConfigError("--config", std::string("parse error: ") + e.what());
    }
    return nhpc::RunConfig::from_json(j);
}

int env_workers() {
    const char* env = std::getenv("NHPC_WORKERS");
    return env ? std::atoi(env) : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Persistent currents and susceptibilities of dissipative tight-binding systems"};
    app.require_subcommand(1);

    std::string config_path, preset_name, output_dir;
    int workers = env_workers();
    double delta_phi = 0.0;
    double tol = 1.0;

    auto* sweep_cmd = app.add_subcommand("sweep", "run a phi sweep and write CSV outputs");
    sweep_cmd->add_option("--config", config_path, "JSON config file");
    sweep_cmd->add_option("--preset", preset_name, "built-in preset name");
    sweep_cmd->add_option("--output-dir", output_dir, "output directory override");
    sweep_cmd->add_option("--workers", workers, "worker thread count (0 = hardware)");
    sweep_cmd->add_option("--delta-phi", delta_phi, "finite-difference step override");

    auto* verify_cmd = app.add_subcommand("verify", "run the invariant verification suite");
    verify_cmd->add_option("--config", config_path, "JSON config file");
    verify_cmd->add_option("--preset", preset_name, "built-in preset name");
    verify_cmd->add_option("--tol", tol, "threshold scale factor (<1 tightens)");

    auto* list_cmd = app.add_subcommand("preset-list", "list built-in presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_cmd->parsed()) {
            for (const auto& [name, cfg] : nhpc::presets()) {
                std::cout << name << ": "
                          << (cfg.model.kind == nhpc::ModelKind::Sns ? "sns" : "ring")
                          << ", phi points " << cfg.phi_grid.count << ", methods";
                if (cfg.methods.empty()) std::cout << " (kappa scan)";
                for (nhpc::Method m : cfg.methods) std::cout << ' ' << nhpc::method_name(m);
                std::cout << '\n';
            }
            return 0;
        }

        nhpc::RunConfig config = load_config(config_path, preset_name);
        if (!output_dir.empty()) config.output_dir = output_dir;
        if (workers > 0) config.workers = workers;
        if (delta_phi > 0.0) config.delta_phi = delta_phi;

        if (sweep_cmd->parsed()) {
            const nhpc::SweepResult result = nhpc::run_sweep(config);
            std::cout << "wrote " << result.files.size() << " files to " << config.output_dir
                      << " in " << result.wall_seconds << " s";
            if (!result.nudges.empty())
                std::cout << " (" << result.nudges.size() << " EP nudge(s) applied)";
            std::cout << '\n';
            return 0;
        }
        if (verify_cmd->parsed()) {
            const nhpc::VerifyReport report = nhpc::verify(config, tol);
            if (!report.all_passed()) {
                std::cerr << "verification failed\n";
                return 3;
            }
            return 0;
        }
    } catch (const nhpc::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const nhpc::SpecError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const nhpc::Error& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
