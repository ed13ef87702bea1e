#pragma once

#include "frisce/estimators.hpp"
#include "frisce/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace frisce {

enum class SweepAxis { snr_db, sigma_pos };

enum class EstimatorKind {
    ls_ideal_t,
    krf_ideal_t,
    ls_mismatched_t,
    krf_mismatched_t,
    joint_tgh,
    static_ris_baseline,
};

const char* to_string(SweepAxis axis);
const char* to_string(EstimatorKind kind);
SweepAxis sweep_axis_from_string(const std::string& s);        // throws ConfigError
EstimatorKind estimator_from_string(const std::string& s);     // throws ConfigError

struct ExperimentConfig {
    SystemConfig system;
    SweepAxis sweep_axis = SweepAxis::snr_db;
    std::vector<double> sweep_values;
    std::vector<EstimatorKind> estimators;
    std::string output_path = "results.csv";
};

void validate(const ExperimentConfig& cfg);

// Parses the JSON config file. Unknown keys are rejected at every level.
ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config(const std::string& json_text);

struct ResultRow {
    std::string estimator;
    std::string sweep_axis;
    double sweep_value = 0.0;
    int trial = 0;
    std::optional<double> nmse_theta;
    std::optional<double> nmse_z;
    std::optional<double> nmse_g;
    std::optional<double> nmse_h;
    std::optional<double> nmse_t;
    std::uint64_t seed_used = 0;
};

struct RunStats {
    int resampled_trials = 0;  // degenerate-column redraws
};

// Runs the full sweep: for every (sweep value, trial) a fresh scenario is
// drawn, every selected estimator runs on it, scaling ambiguity is resolved
// and the NMSEs recorded. Rows come back in canonical order (estimator as
// listed, then sweep value, then trial) and are a pure function of
// (config, seed) independent of the thread count.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, int threads = 1,
                                      RunStats* stats = nullptr);

// One trial of the fixed-element baseline: J*K independent DFT phase
// configurations, motion disabled (T = all-ones), then the same LS + KRF
// pipeline for the combined channel.
ResultRow static_ris_baseline(const SystemConfig& cfg, RandomStream& rng);

// CSV with header estimator,sweep_axis,sweep_value,trial,nmse_theta,nmse_z,
// nmse_G,nmse_H,nmse_T,seed; shortest round-trip decimals, LF endings.
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::string csv_string(const std::vector<ResultRow>& rows);

// Standalone gnuplot script plotting 10*log10(median NMSE) per estimator
// against the sweep axis, reading the emitted CSV.
void emit_plot_script(const std::vector<ResultRow>& rows, const std::string& csv_path,
                      const std::string& script_path);
std::string plot_script_string(const std::vector<ResultRow>& rows,
                               const std::string& csv_path);

}  // namespace frisce
