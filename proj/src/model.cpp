#include "frisce/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace frisce {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

CMatrix dft_block(int rows, int cols, int n) {
    // rows x cols top-left block of the n-point DFT matrix.
    CMatrix out(rows, cols);
    const double w = -2.0 * std::numbers::pi / static_cast<double>(n);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r)
            out(r, c) = std::polar(1.0, w * static_cast<double>(r) * c);
    return out;
}

}  // namespace

void validate(const SystemConfig& cfg) {
    require(cfg.fluid_elements >= 1, "config: M (fluid_elements) must be >= 1");
    require(cfg.users >= 1, "config: Q (users) must be >= 1");
    require(cfg.bs_antennas >= 1, "config: M_r (bs_antennas) must be >= 1");
    require(cfg.symbols_per_block >= 1, "config: T_s (symbols_per_block) must be >= 1");
    require(cfg.blocks >= 1, "config: K (blocks) must be >= 1");
    require(cfg.subframes >= 1, "config: J (subframes) must be >= 1");
    require(cfg.symbols_per_block >= cfg.users,
            "config: T_s must be >= Q for orthogonal pilots");
    require(cfg.subframes >= cfg.fluid_elements,
            "config: J must be >= M for a semi-unitary phase matrix");
    require(cfg.preset_positions >= 1, "config: N (preset_positions) must be >= 1");
    require(cfg.preset_positions >= cfg.blocks,
            "config: N must be >= K to command K distinct moves");
    require(cfg.wavelength > 0.0, "config: wavelength must be positive");
    require(cfg.area_side > 0.0, "config: area_side must be positive");
    require(cfg.sigma_pos >= 0.0, "config: sigma_pos must be >= 0");
    require(!std::isnan(cfg.snr_db), "config: snr_db must not be NaN");
    require(cfg.trials >= 1, "config: trials must be >= 1");
}

ChannelSet generate_channels(const SystemConfig& cfg, RandomStream& rng) {
    ChannelSet ch;
    ch.g.resize(cfg.fluid_elements, cfg.users);
    ch.h.resize(cfg.bs_antennas, cfg.fluid_elements);
    for (Index c = 0; c < ch.g.cols(); ++c)
        for (Index r = 0; r < ch.g.rows(); ++r) ch.g(r, c) = rng.complex_gaussian();
    for (Index c = 0; c < ch.h.cols(); ++c)
        for (Index r = 0; r < ch.h.rows(); ++r) ch.h(r, c) = rng.complex_gaussian();
    return ch;
}

CMatrix build_phase_matrix(int subframes, int fluid_elements) {
    if (subframes < fluid_elements) {
        throw ConfigError("build_phase_matrix: J=" + std::to_string(subframes) +
                          " < M=" + std::to_string(fluid_elements) +
                          " breaks semi-unitarity");
    }
    return dft_block(subframes, fluid_elements, subframes);
}

CMatrix build_pilot_matrix(int users, int symbols_per_block) {
    if (symbols_per_block < users) {
        throw ConfigError("build_pilot_matrix: T_s=" + std::to_string(symbols_per_block) +
                          " < Q=" + std::to_string(users) + " breaks pilot orthogonality");
    }
    return dft_block(users, symbols_per_block, symbols_per_block);
}

PresetGrid build_preset_grid(const SystemConfig& cfg) {
    const int m_total = cfg.fluid_elements;
    const int n = cfg.preset_positions;
    const double tile = cfg.area_side / std::sqrt(static_cast<double>(m_total));
    const int tiles_per_row =
        static_cast<int>(std::ceil(std::sqrt(static_cast<double>(m_total))));
    const int g = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    const double step = tile / g;

    PresetGrid grid(static_cast<std::size_t>(m_total));
    for (int m = 0; m < m_total; ++m) {
        const double x0 = (m % tiles_per_row) * tile;
        const double y0 = (m / tiles_per_row) * tile;
        grid[m].reserve(static_cast<std::size_t>(n));
        for (int p = 0; p < n; ++p) {
            const int gr = p / g;
            const int gc = p % g;
            grid[m].push_back({x0 + (gc + 0.5) * step, y0 + (gr + 0.5) * step});
        }
    }
    return grid;
}

MotionSchedule draw_motion_schedule(const PresetGrid& grid, const SystemConfig& cfg,
                                    RandomStream& rng) {
    if (cfg.preset_positions < cfg.blocks) {
        throw ConfigError("draw_motion_schedule: N=" + std::to_string(cfg.preset_positions) +
                          " < K=" + std::to_string(cfg.blocks));
    }
    const int k_total = cfg.blocks, m_total = cfg.fluid_elements;
    MotionSchedule sched;
    sched.points.resize(static_cast<std::size_t>(k_total) * m_total);
    sched.dist.resize(k_total, m_total);
    sched.t.resize(k_total, m_total);
    const double phase_per_meter = -2.0 * std::numbers::pi / cfg.wavelength;
    for (int m = 0; m < m_total; ++m) {
        const auto picks = rng.sample_without_replacement(cfg.preset_positions, k_total);
        for (int k = 0; k < k_total; ++k) {
            const Point2& p = grid[m][static_cast<std::size_t>(picks[k])];
            sched.points[static_cast<std::size_t>(k + k_total * m)] = p;
            sched.dist(k, m) = p.norm();
            sched.t(k, m) = std::polar(1.0, phase_per_meter * sched.dist(k, m));
        }
    }
    return sched;
}

RealizedMotion perturb_positions(const MotionSchedule& cmd, double sigma_pos,
                                 double wavelength, RandomStream& rng) {
    if (sigma_pos < 0.0) throw ConfigError("perturb_positions: sigma_pos must be >= 0");
    RealizedMotion real;
    if (sigma_pos == 0.0) {
        real.dist = cmd.dist;
        real.t = cmd.t;
        return real;
    }
    const Index k_total = cmd.dist.rows(), m_total = cmd.dist.cols();
    real.dist.resize(k_total, m_total);
    real.t.resize(k_total, m_total);
    const double sd = sigma_pos * wavelength;  // meters
    const double phase_per_meter = -2.0 * std::numbers::pi / wavelength;
    for (Index m = 0; m < m_total; ++m) {
        for (Index k = 0; k < k_total; ++k) {
            real.dist(k, m) = cmd.dist(k, m) + sd * rng.gaussian();
            real.t(k, m) = std::polar(1.0, phase_per_meter * real.dist(k, m));
        }
    }
    return real;
}

FrisProtocol make_protocol(const SystemConfig& cfg, RandomStream& rng) {
    FrisProtocol proto;
    proto.phi = build_phase_matrix(cfg.subframes, cfg.fluid_elements);
    proto.pilots = build_pilot_matrix(cfg.users, cfg.symbols_per_block);
    proto.grid = build_preset_grid(cfg);
    proto.cmd = draw_motion_schedule(proto.grid, cfg, rng);
    RealizedMotion real = perturb_positions(proto.cmd, cfg.sigma_pos, cfg.wavelength, rng);
    proto.dist_real = std::move(real.dist);
    proto.t_real = std::move(real.t);
    return proto;
}

ReceivedSignal synthesize_received(const ChannelSet& ch, const FrisProtocol& proto,
                                   double snr_db, RandomStream& rng) {
    const Index m = ch.g.rows(), q = ch.g.cols(), mr = ch.h.rows();
    const Index ts = proto.pilots.cols(), k_total = proto.t_real.rows(),
                j_total = proto.phi.rows();
    if (ch.h.cols() != m || proto.phi.cols() != m || proto.t_real.cols() != m ||
        proto.pilots.rows() != q) {
        throw DimensionError("synthesize_received: inconsistent dims: H " +
                             shape_str(ch.h.rows(), ch.h.cols()) + ", G " +
                             shape_str(ch.g.rows(), ch.g.cols()) + ", Phi " +
                             shape_str(proto.phi.rows(), proto.phi.cols()) + ", T " +
                             shape_str(proto.t_real.rows(), proto.t_real.cols()) +
                             ", Xp " + shape_str(proto.pilots.rows(), proto.pilots.cols()));
    }

    ReceivedSignal sig;
    sig.y_raw = Tensor4(mr, ts, k_total, j_total);
    const bool noiseless = std::isinf(snr_db) && snr_db > 0.0;
    sig.noise_var = noiseless ? 0.0
                              : static_cast<double>(m) * static_cast<double>(q) *
                                    std::pow(10.0, -snr_db / 10.0);
    const double ns = std::sqrt(sig.noise_var);

    for (Index j = 0; j < j_total; ++j) {
        for (Index k = 0; k < k_total; ++k) {
            const CVector w = proto.phi.row(j).transpose().cwiseProduct(
                proto.t_real.row(k).transpose());
            auto block = sig.y_raw.slice(k, j);
            block = ch.h * w.asDiagonal() * ch.g * proto.pilots;
            if (!noiseless) {
                for (Index c = 0; c < ts; ++c)
                    for (Index r = 0; r < mr; ++r)
                        block(r, c) += ns * rng.complex_gaussian();
            }
        }
    }
    return sig;
}

}  // namespace frisce
