#pragma once

#include "frisce/rng.hpp"
#include "frisce/types.hpp"

#include <cstdint>
#include <vector>

namespace frisce {

// All scalar parameters of one simulated scenario.
struct SystemConfig {
    int fluid_elements = 12;   // M
    int users = 4;             // Q
    int bs_antennas = 10;      // Mr
    int symbols_per_block = 4; // Ts
    int blocks = 4;            // K, blocks per sub-frame
    int subframes = 12;        // J
    double wavelength = 0.1;   // meters
    int preset_positions = 16; // N per element
    double area_side = 0.3;    // meters, surface is area_side^2
    double snr_db = 30.0;      // +inf disables noise
    double sigma_pos = 0.0;    // position-error std, in wavelengths
    int trials = 100;
    std::uint64_t seed = 1;
};

// Throws ConfigError naming the offending field.
void validate(const SystemConfig& cfg);

struct ChannelSet {
    CMatrix g;  // M x Q, UEs -> FRIS
    CMatrix h;  // Mr x M, FRIS -> BS
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    double norm() const { return std::hypot(x, y); }
};

// grid[m][n] is the n-th selectable position of element m, in surface-plane
// coordinates relative to a common reference corner.
using PresetGrid = std::vector<std::vector<Point2>>;

struct MotionSchedule {
    std::vector<Point2> points;  // commanded position per (k,m), k + K*m order
    RMatrix dist;                // K x M commanded radial distances |p|
    CMatrix t;                   // K x M, t(k,m) = exp(-i 2pi dist(k,m)/lambda)
    const Point2& point(Index k, Index m) const {
        return points[static_cast<std::size_t>(k + dist.rows() * m)];
    }
};

// Full training-phase configuration of one trial.
struct FrisProtocol {
    CMatrix phi;        // J x M electronic phase shifts, semi-unitary
    CMatrix pilots;     // Q x Ts, row-orthogonal
    PresetGrid grid;    // N positions per element
    MotionSchedule cmd; // commanded schedule, repeated over all sub-frames
    RMatrix dist_real;  // K x M realized radial distances
    CMatrix t_real;     // K x M realized motion phases
};

struct ReceivedSignal {
    Tensor4 y_raw;     // Mr x Ts x K x J pre-filter blocks
    double noise_var;  // sigma_v^2 per entry
};

// i.i.d. CN(0,1) channel pair; deterministic given the stream state.
ChannelSet generate_channels(const SystemConfig& cfg, RandomStream& rng);

// First M columns of the J-point DFT matrix: Phi(j,m) = exp(-i 2pi j m / J),
// so Phi^H Phi = J I_M. Requires J >= M.
CMatrix build_phase_matrix(int subframes, int fluid_elements);

// First Q rows of the Ts-point DFT matrix: Xp Xp^H = Ts I_Q. Requires Ts >= Q.
CMatrix build_pilot_matrix(int users, int symbols_per_block);

// N lattice positions per element, cell-centered on a uniform sub-grid of the
// element's tile (tile side = area_side / sqrt(M)).
PresetGrid build_preset_grid(const SystemConfig& cfg);

// Per element, K distinct preset positions chosen uniformly without
// replacement; the schedule is repeated over all J sub-frames.
MotionSchedule draw_motion_schedule(const PresetGrid& grid, const SystemConfig& cfg,
                                    RandomStream& rng);

struct RealizedMotion {
    RMatrix dist;  // K x M
    CMatrix t;     // K x M
};

// Adds i.i.d. N(0, (sigma_pos*lambda)^2) errors to the commanded radial
// distances. sigma_pos = 0 returns the commanded schedule bit-exactly.
RealizedMotion perturb_positions(const MotionSchedule& cmd, double sigma_pos,
                                 double wavelength, RandomStream& rng);

// Builds phase matrix, pilots, grid, schedule and realized motion in one go.
FrisProtocol make_protocol(const SystemConfig& cfg, RandomStream& rng);

// Per (j,k) block: Yt = H diag(phi_j had t_real_k) G Xp + noise, with
// noise entries CN(0, sigma_v^2), sigma_v^2 = M*Q*10^(-snr_db/10).
ReceivedSignal synthesize_received(const ChannelSet& ch, const FrisProtocol& proto,
                                   double snr_db, RandomStream& rng);

}  // namespace frisce
