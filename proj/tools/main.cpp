#include "frisce/harness.hpp"
#include "frisce/log.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <iostream>

namespace {

int cmd_validate(const std::string& config_path) {
    frisce::ExperimentConfig cfg = frisce::load_experiment_config(config_path);
    std::cout << "config OK: " << cfg.sweep_values.size() << " sweep points x "
              << cfg.system.trials << " trials, " << cfg.estimators.size()
              << " estimators, axis " << frisce::to_string(cfg.sweep_axis) << "\n";
    return 0;
}

int cmd_run(const std::string& config_path, std::uint64_t* seed_override,
            const std::string& out_override, const std::string& plot_path,
            int threads) {
    frisce::ExperimentConfig cfg = frisce::load_experiment_config(config_path);
    if (seed_override) cfg.system.seed = *seed_override;
    if (!out_override.empty()) cfg.output_path = out_override;

    const auto t0 = std::chrono::steady_clock::now();
    frisce::RunStats stats;
    const auto rows = frisce::run_experiment(cfg, threads, &stats);
    const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);

    frisce::emit_csv(rows, cfg.output_path);
    std::cout << rows.size() << " rows -> " << cfg.output_path << " ("
              << dt.count() << " s";
    if (stats.resampled_trials > 0)
        std::cout << ", " << stats.resampled_trials << " resampled trials";
    std::cout << ")\n";

    if (!plot_path.empty()) {
        frisce::emit_plot_script(rows, cfg.output_path, plot_path);
        std::cout << "plot script -> " << plot_path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fris-ce: channel-estimation simulator for a fluid-RIS assisted "
                 "multi-user MISO uplink"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::string plot_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;

    CLI::App* run = app.add_subcommand("run", "run the configured Monte-Carlo sweep");
    run->add_option("--config", config_path, "JSON experiment config")->required();
    run->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { seed_set = true; });
    run->add_option("--out", out_override, "override the CSV output path");
    run->add_option("--plot", plot_path, "also write a gnuplot script here");
    run->add_option("--threads", threads, "worker threads (default 1)")
        ->check(CLI::PositiveNumber);

    CLI::App* validate = app.add_subcommand("validate", "check a config and exit");
    validate->add_option("--config", config_path, "JSON experiment config")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (app.got_subcommand(validate)) return cmd_validate(config_path);
        return cmd_run(config_path, seed_set ? &seed : nullptr, out_override,
                       plot_path, threads);
    } catch (const frisce::ConfigError& e) {
        frisce::log::error(e.what());
        return 2;
    } catch (const std::exception& e) {
        frisce::log::error(e.what());
        return 1;
    }
}
