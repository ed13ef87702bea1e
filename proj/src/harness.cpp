#include "frisce/harness.hpp"

#include "frisce/log.hpp"

#include <json.hpp>

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace frisce {

using nlohmann::json;

namespace {

constexpr int kMaxResampleAttempts = 8;
constexpr std::uint64_t kBaselineSalt = 0x5354415449435249ULL;  // "STATICRI"

std::string fmt_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

SystemConfig apply_sweep(SystemConfig sys, SweepAxis axis, double value) {
    if (axis == SweepAxis::snr_db) {
        sys.snr_db = value;
    } else {
        sys.sigma_pos = value;
    }
    return sys;
}

ResultRow base_row(const ExperimentConfig& cfg, EstimatorKind kind, double value,
                   int trial, std::uint64_t seed_used) {
    ResultRow row;
    row.estimator = to_string(kind);
    row.sweep_axis = to_string(cfg.sweep_axis);
    row.sweep_value = value;
    row.trial = trial;
    row.seed_used = seed_used;
    return row;
}

// One scenario draw and every selected estimator on it. Throws
// DegenerateColumnError through to the caller, which resamples.
std::vector<ResultRow> run_trial_once(const ExperimentConfig& cfg,
                                      const SystemConfig& sys, double value,
                                      int trial, std::uint64_t seed_used) {
    RandomStream rng(seed_used);
    const ChannelSet ch = generate_channels(sys, rng);
    const FrisProtocol proto = make_protocol(sys, rng);
    const ReceivedSignal sig = synthesize_received(ch, proto, sys.snr_db, rng);
    const Tensor4 y = matched_filter(sig, proto.pilots);

    const CMatrix theta_true = khatri_rao(ch.g.transpose(), ch.h);
    const CMatrix z_true = khatri_rao(proto.t_real, theta_true);
    const Index mr = ch.h.rows(), q = ch.g.cols(), k = proto.t_real.rows();

    std::vector<ResultRow> rows;
    rows.reserve(cfg.estimators.size());
    for (const EstimatorKind kind : cfg.estimators) {
        ResultRow row = base_row(cfg, kind, value, trial, seed_used);
        switch (kind) {
            case EstimatorKind::ls_ideal_t: {
                row.nmse_theta = nmse(estimate_theta_ls(y, proto.phi, proto.t_real),
                                      theta_true);
                break;
            }
            case EstimatorKind::ls_mismatched_t: {
                row.nmse_theta = nmse(estimate_theta_ls(y, proto.phi, proto.cmd.t),
                                      theta_true);
                break;
            }
            case EstimatorKind::krf_ideal_t:
            case EstimatorKind::krf_mismatched_t: {
                const CMatrix& t_assumed = kind == EstimatorKind::krf_ideal_t
                                               ? proto.t_real
                                               : proto.cmd.t;
                Krf2Estimate est = krf2(estimate_theta_ls(y, proto.phi, t_assumed), mr, q);
                row.nmse_theta = nmse(est.theta, theta_true);
                resolve_scaling(est, ch.h);
                row.nmse_g = nmse(est.g, ch.g);
                row.nmse_h = nmse(est.h, ch.h);
                break;
            }
            case EstimatorKind::joint_tgh: {
                Krf3Estimate est = krf3(estimate_z_ls(y, proto.phi), mr, q, k);
                row.nmse_z = nmse(est.z, z_true);
                resolve_scaling(est, ch.g, ch.h, proto.t_real);
                row.nmse_theta =
                    nmse(khatri_rao(est.g.transpose(), est.h), theta_true);
                row.nmse_g = nmse(est.g, ch.g);
                row.nmse_h = nmse(est.h, ch.h);
                row.nmse_t = nmse(est.t, proto.t_real);
                break;
            }
            case EstimatorKind::static_ris_baseline: {
                RandomStream brng =
                    RandomStream::derive(seed_used, kBaselineSalt);
                ResultRow metrics = static_ris_baseline(sys, brng);
                row.nmse_theta = metrics.nmse_theta;
                row.nmse_g = metrics.nmse_g;
                row.nmse_h = metrics.nmse_h;
                break;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ResultRow> run_trial(const ExperimentConfig& cfg, std::size_t sweep_idx,
                                 int trial, std::atomic<int>& resampled) {
    const double value = cfg.sweep_values[sweep_idx];
    const SystemConfig sys = apply_sweep(cfg.system, cfg.sweep_axis, value);
    for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
        const std::uint64_t seed_used = RandomStream::derive_seed(
            sys.seed, sweep_idx, static_cast<std::uint64_t>(trial),
            static_cast<std::uint64_t>(attempt));
        try {
            return run_trial_once(cfg, sys, value, trial, seed_used);
        } catch (const DegenerateColumnError& e) {
            resampled.fetch_add(1, std::memory_order_relaxed);
            log::warn("trial ", trial, " at ", to_string(cfg.sweep_axis), "=", value,
                      " resampled: ", e.what());
        }
    }
    throw Error("run_experiment: trial " + std::to_string(trial) +
                " kept producing degenerate columns after " +
                std::to_string(kMaxResampleAttempts) + " redraws");
}

}  // namespace

const char* to_string(SweepAxis axis) {
    return axis == SweepAxis::snr_db ? "snr_db" : "sigma_pos";
}

const char* to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::ls_ideal_t: return "ls-ideal-T";
        case EstimatorKind::krf_ideal_t: return "krf-ideal-T";
        case EstimatorKind::ls_mismatched_t: return "ls-mismatched-T";
        case EstimatorKind::krf_mismatched_t: return "krf-mismatched-T";
        case EstimatorKind::joint_tgh: return "joint-TGH";
        case EstimatorKind::static_ris_baseline: return "static-ris-baseline";
    }
    return "?";
}

SweepAxis sweep_axis_from_string(const std::string& s) {
    if (s == "snr_db") return SweepAxis::snr_db;
    if (s == "sigma_pos") return SweepAxis::sigma_pos;
    throw ConfigError("config: unknown sweep_axis '" + s +
                      "' (expected snr_db or sigma_pos)");
}

EstimatorKind estimator_from_string(const std::string& s) {
    for (const EstimatorKind k :
         {EstimatorKind::ls_ideal_t, EstimatorKind::krf_ideal_t,
          EstimatorKind::ls_mismatched_t, EstimatorKind::krf_mismatched_t,
          EstimatorKind::joint_tgh, EstimatorKind::static_ris_baseline}) {
        if (s == to_string(k)) return k;
    }
    throw ConfigError("config: unknown estimator tag '" + s + "'");
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.sweep_values.empty()) throw ConfigError("config: sweep_values is empty");
    for (std::size_t i = 0; i < cfg.sweep_values.size(); ++i) {
        if (!std::isfinite(cfg.sweep_values[i]))
            throw ConfigError("config: sweep_values must be finite");
        if (i > 0 && cfg.sweep_values[i] <= cfg.sweep_values[i - 1])
            throw ConfigError("config: sweep_values must be strictly increasing");
    }
    if (cfg.estimators.empty()) throw ConfigError("config: estimators is empty");
    for (std::size_t i = 0; i < cfg.estimators.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.estimators.size(); ++j)
            if (cfg.estimators[i] == cfg.estimators[j])
                throw ConfigError(std::string("config: duplicate estimator tag '") +
                                  to_string(cfg.estimators[i]) + "'");
    if (cfg.output_path.empty()) throw ConfigError("config: output_path is empty");
    // Every sweep point must yield a valid scenario before anything runs.
    for (const double v : cfg.sweep_values)
        validate(apply_sweep(cfg.system, cfg.sweep_axis, v));
    validate(cfg.system);
}

namespace {

void reject_unknown_keys(const json& obj, const char* where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) { known = true; break; }
        if (!known)
            throw ConfigError(std::string("config: unknown key '") + item.key() +
                              "' in " + where);
    }
}

template <typename T>
T take_number(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer() && !v.is_number_unsigned())
            throw ConfigError(std::string("config: '") + key + "' must be an integer");
    } else {
        if (!v.is_number())
            throw ConfigError(std::string("config: '") + key + "' must be a number");
    }
    return v.get<T>();
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    reject_unknown_keys(j, "config",
                        {"system", "sweep_axis", "sweep_values", "estimators",
                         "output_path"});

    ExperimentConfig cfg;
    try {
        if (j.contains("system")) {
            const json& s = j.at("system");
            if (!s.is_object()) throw ConfigError("config: 'system' must be an object");
            reject_unknown_keys(s, "system",
                                {"M", "Q", "M_r", "T_s", "K", "J", "wavelength", "N",
                                 "area_side", "snr_db", "sigma_pos", "trials", "seed"});
            SystemConfig& sys = cfg.system;
            sys.fluid_elements = take_number<int>(s, "M", sys.fluid_elements);
            sys.users = take_number<int>(s, "Q", sys.users);
            sys.bs_antennas = take_number<int>(s, "M_r", sys.bs_antennas);
            sys.symbols_per_block = take_number<int>(s, "T_s", sys.symbols_per_block);
            sys.blocks = take_number<int>(s, "K", sys.blocks);
            // J defaults to M, the smallest semi-unitary design.
            sys.subframes = take_number<int>(s, "J", sys.fluid_elements);
            sys.wavelength = take_number<double>(s, "wavelength", sys.wavelength);
            sys.preset_positions = take_number<int>(s, "N", sys.preset_positions);
            sys.area_side = take_number<double>(s, "area_side", sys.area_side);
            sys.snr_db = take_number<double>(s, "snr_db", sys.snr_db);
            sys.sigma_pos = take_number<double>(s, "sigma_pos", sys.sigma_pos);
            sys.trials = take_number<int>(s, "trials", sys.trials);
            sys.seed = take_number<std::uint64_t>(s, "seed", sys.seed);
        }
        if (!j.contains("sweep_axis")) throw ConfigError("config: missing 'sweep_axis'");
        if (!j.at("sweep_axis").is_string())
            throw ConfigError("config: 'sweep_axis' must be a string");
        cfg.sweep_axis = sweep_axis_from_string(j.at("sweep_axis").get<std::string>());

        if (!j.contains("sweep_values"))
            throw ConfigError("config: missing 'sweep_values'");
        if (!j.at("sweep_values").is_array())
            throw ConfigError("config: 'sweep_values' must be an array of numbers");
        for (const json& v : j.at("sweep_values")) {
            if (!v.is_number())
                throw ConfigError("config: 'sweep_values' must be an array of numbers");
            cfg.sweep_values.push_back(v.get<double>());
        }

        if (!j.contains("estimators")) throw ConfigError("config: missing 'estimators'");
        if (!j.at("estimators").is_array())
            throw ConfigError("config: 'estimators' must be an array of tags");
        for (const json& v : j.at("estimators")) {
            if (!v.is_string())
                throw ConfigError("config: 'estimators' must be an array of tags");
            cfg.estimators.push_back(estimator_from_string(v.get<std::string>()));
        }

        if (j.contains("output_path")) {
            if (!j.at("output_path").is_string())
                throw ConfigError("config: 'output_path' must be a string");
            cfg.output_path = j.at("output_path").get<std::string>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str());
}

ResultRow static_ris_baseline(const SystemConfig& cfg, RandomStream& rng) {
    // Equal training budget: J*K orthogonal phase configurations, one block
    // each, elements fixed (T = 1).
    const int j_total = cfg.subframes * cfg.blocks;
    SystemConfig bcfg = cfg;
    bcfg.subframes = j_total;
    bcfg.blocks = 1;
    bcfg.sigma_pos = 0.0;

    const ChannelSet ch = generate_channels(bcfg, rng);
    FrisProtocol proto;
    proto.phi = build_phase_matrix(j_total, bcfg.fluid_elements);
    proto.pilots = build_pilot_matrix(bcfg.users, bcfg.symbols_per_block);
    proto.cmd.dist = RMatrix::Zero(1, bcfg.fluid_elements);
    proto.cmd.t = CMatrix::Ones(1, bcfg.fluid_elements);
    proto.cmd.points.assign(static_cast<std::size_t>(bcfg.fluid_elements), Point2{});
    proto.dist_real = proto.cmd.dist;
    proto.t_real = proto.cmd.t;

    const ReceivedSignal sig = synthesize_received(ch, proto, bcfg.snr_db, rng);
    const Tensor4 y = matched_filter(sig, proto.pilots);
    const CMatrix theta_true = khatri_rao(ch.g.transpose(), ch.h);

    Krf2Estimate est = krf2(estimate_theta_ls(y, proto.phi, proto.t_real),
                            ch.h.rows(), ch.g.cols());
    ResultRow row;
    row.estimator = to_string(EstimatorKind::static_ris_baseline);
    row.nmse_theta = nmse(est.theta, theta_true);
    resolve_scaling(est, ch.h);
    row.nmse_g = nmse(est.g, ch.g);
    row.nmse_h = nmse(est.h, ch.h);
    return row;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, int threads,
                                      RunStats* stats) {
    validate(cfg);
    const std::size_t n_sweep = cfg.sweep_values.size();
    const std::size_t n_trials = static_cast<std::size_t>(cfg.system.trials);
    const std::size_t n_items = n_sweep * n_trials;

    std::vector<std::vector<ResultRow>> item_rows(n_items);
    std::atomic<int> resampled{0};
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n_items) return;
            try {
                item_rows[i] = run_trial(cfg, i / n_trials,
                                         static_cast<int>(i % n_trials), resampled);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(n_items)));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    // Canonical order: estimator as configured, then sweep value, then trial.
    std::vector<ResultRow> rows;
    rows.reserve(n_items * cfg.estimators.size());
    for (std::size_t e = 0; e < cfg.estimators.size(); ++e)
        for (std::size_t i = 0; i < n_items; ++i)
            rows.push_back(std::move(item_rows[i][e]));

    if (stats) stats->resampled_trials = resampled.load();
    log::info("run_experiment: ", rows.size(), " rows, ", resampled.load(),
              " resampled trials");
    return rows;
}

std::string csv_string(const std::vector<ResultRow>& rows) {
    std::string out =
        "estimator,sweep_axis,sweep_value,trial,nmse_theta,nmse_z,nmse_G,nmse_H,"
        "nmse_T,seed\n";
    auto field = [](const std::optional<double>& v) {
        return v ? fmt_double(*v) : std::string();
    };
    for (const ResultRow& r : rows) {
        out += r.estimator;
        out += ',';
        out += r.sweep_axis;
        out += ',';
        out += fmt_double(r.sweep_value);
        out += ',';
        out += std::to_string(r.trial);
        out += ',';
        out += field(r.nmse_theta);
        out += ',';
        out += field(r.nmse_z);
        out += ',';
        out += field(r.nmse_g);
        out += ',';
        out += field(r.nmse_h);
        out += ',';
        out += field(r.nmse_t);
        out += ',';
        out += std::to_string(r.seed_used);
        out += '\n';
    }
    return out;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("emit_csv: cannot open '" + path + "' for writing");
    out << csv_string(rows);
    out.flush();
    if (!out) throw Error("emit_csv: write failed for '" + path + "'");
}

namespace {

// "0.05" -> "λ/20" when 1/v is (almost) an integer, else "<v>λ".
std::string lambda_fraction_label(double v) {
    if (v == 0.0) return "0";
    const double inv = 1.0 / v;
    const double rounded = std::round(inv);
    if (rounded >= 1.0 && std::abs(inv - rounded) <= 1e-9 * inv)
        return "λ/" + fmt_double(rounded);
    return fmt_double(v) + "λ";
}

int metric_column(const std::string& estimator) {
    return estimator == "joint-TGH" ? 6 : 5;  // nmse_z vs nmse_theta, 1-based
}

}  // namespace

std::string plot_script_string(const std::vector<ResultRow>& rows,
                               const std::string& csv_path) {
    if (rows.empty()) throw Error("emit_plot_script: no rows");
    const std::string axis = rows.front().sweep_axis;

    // Preserve first-appearance order of estimators and sorted sweep values.
    std::vector<std::string> tags;
    std::vector<double> values;
    for (const ResultRow& r : rows) {
        bool seen = false;
        for (const auto& t : tags) seen = seen || t == r.estimator;
        if (!seen) tags.push_back(r.estimator);
        bool have = false;
        for (const double v : values) have = have || v == r.sweep_value;
        if (!have) values.push_back(r.sweep_value);
    }
    std::sort(values.begin(), values.end());

    std::ostringstream os;
    os << "# NMSE curves, median over trials per estimator.\n";
    os << "# Data: " << csv_path << "\n";
    os << "set datafile separator comma\n";
    os << "csv = \"" << csv_path << "\"\n";
    os << "set terminal svg size 900,600 dynamic\n";
    os << "set output \"" << csv_path << ".svg\"\n";
    os << "set grid\n";
    os << "set key bottom left\n";
    if (axis == "snr_db") {
        os << "set xlabel \"SNR [dB]\"\n";
        os << "set title \"NMSE vs SNR\"\n";
    } else {
        os << "set xlabel \"position-error std [wavelengths]\"\n";
        os << "set title \"NMSE vs position error\"\n";
        os << "set xtics (";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) os << ", ";
            os << '"' << lambda_fraction_label(values[i]) << "\" "
               << fmt_double(values[i]);
        }
        os << ")\n";
    }
    os << "set ylabel \"NMSE [dB]\"\n";
    os << "nx = " << values.size() << "\n";
    os << "array XS[" << values.size() << "]\n";
    os << "array XT[" << values.size() << "]\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        // XT holds the exact CSV text of each sweep value for row matching.
        os << "XS[" << i + 1 << "] = " << fmt_double(values[i]) << "\n";
        os << "XT[" << i + 1 << "] = \"" << fmt_double(values[i]) << "\"\n";
    }

    for (std::size_t e = 0; e < tags.size(); ++e) {
        os << "array MED" << e + 1 << "[nx]\n";
        os << "do for [ix=1:nx] {\n";
        os << "    stats csv using (strcol(1) eq \"" << tags[e]
           << "\" && strcol(3) eq XT[ix] ? column(" << metric_column(tags[e])
           << ") : NaN) nooutput\n";
        os << "    MED" << e + 1 << "[ix] = STATS_median\n";
        os << "}\n";
    }
    os << "plot \\\n";
    for (std::size_t e = 0; e < tags.size(); ++e) {
        os << "    MED" << e + 1 << " using (XS[$1]):(10*log10($2)) "
           << "with linespoints lw 2 pt " << (e % 8) + 1 << " title \"" << tags[e]
           << '"';
        os << (e + 1 < tags.size() ? ", \\\n" : "\n");
    }
    return os.str();
}

void emit_plot_script(const std::vector<ResultRow>& rows, const std::string& csv_path,
                      const std::string& script_path) {
    std::ofstream out(script_path, std::ios::binary);
    if (!out) throw Error("emit_plot_script: cannot open '" + script_path + "'");
    out << plot_script_string(rows, csv_path);
    out.flush();
    if (!out) throw Error("emit_plot_script: write failed for '" + script_path + "'");
}

}  // namespace frisce
