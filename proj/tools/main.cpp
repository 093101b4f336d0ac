#include "experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kExitNumerical = 3;

struct SubcommandState {
    drivenbath::cli::ExperimentKind kind;
    std::string config_path;
    drivenbath::cli::Overrides overrides;
    bool selected = false;
};

} // namespace

int main(int argc, char** argv) {
    using namespace drivenbath::cli;

    CLI::App app{"driven particle-bath simulator: generalized Langevin dynamics, "
                 "fluctuation-dissipation checks and AC Nyquist noise"};
    app.require_subcommand(1);

    std::vector<std::unique_ptr<SubcommandState>> states;
    for (const ExperimentKind kind :
         {ExperimentKind::kernels, ExperimentKind::fdr_check,
          ExperimentKind::driven_fdr_check, ExperimentKind::gle_run,
          ExperimentKind::oracle_compare, ExperimentKind::nyquist,
          ExperimentKind::copper_estimate}) {
        auto state = std::make_unique<SubcommandState>();
        state->kind = kind;
        CLI::App* sub = app.add_subcommand(experiment_name(kind));
        sub->add_option("--config", state->config_path, "experiment config file");
        auto* seed = sub->add_option("--seed", "master RNG seed (overrides the file)");
        auto* out = sub->add_option("--out", "output directory (overrides the file)");
        auto* threads = sub->add_option("--threads", "worker threads (overrides the file)");
        SubcommandState* raw = state.get();
        sub->callback([raw, seed, out, threads] {
            raw->selected = true;
            if (seed->count()) raw->overrides.seed = seed->as<std::uint64_t>();
            if (out->count()) raw->overrides.out_dir = out->as<std::string>();
            if (threads->count()) raw->overrides.threads = threads->as<unsigned>();
        });
        states.push_back(std::move(state));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    const SubcommandState* active = nullptr;
    for (const auto& s : states)
        if (s->selected) active = s.get();
    if (!active) {
        std::cerr << "no experiment selected\n";
        return kExitConfig;
    }

    try {
        const Config config =
            parse_config(active->kind, active->config_path, active->overrides);
        const RunManifest manifest = run_experiment(config);

        std::printf("%s: status %s, %.3f s, outputs in %s\n", manifest.experiment.c_str(),
                    manifest.status.c_str(), manifest.duration_s, config.out_dir.c_str());
        for (const auto& [key, value] : manifest.notes)
            std::printf("  %s = %s\n", key.c_str(), value.c_str());
        if (config.kind == ExperimentKind::copper_estimate) {
            std::ifstream report(config.out_dir + "/copper_report.txt");
            std::cout << report.rdbuf();
        }
        return manifest.status == "fail" ? kExitCheckFailed : kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::logic_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}
