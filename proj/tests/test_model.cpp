#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "frisce/model.hpp"
#include "frisce/tensor_ops.hpp"
#include "oracles.hpp"

#include <limits>

using namespace frisce;

namespace {

SystemConfig desk_config() {
    SystemConfig cfg;  // defaults are the desk scenario {12,4,10,4,4}, J=12
    return cfg;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("generate_channels shapes and determinism") {
    const SystemConfig cfg = desk_config();
    RandomStream rng1(99), rng2(99);
    const ChannelSet a = generate_channels(cfg, rng1);
    const ChannelSet b = generate_channels(cfg, rng2);
    CHECK(a.g.rows() == 12);
    CHECK(a.g.cols() == 4);
    CHECK(a.h.rows() == 10);
    CHECK(a.h.cols() == 12);
    CHECK((a.g - b.g).norm() == 0.0);
    CHECK((a.h - b.h).norm() == 0.0);
}

TEST_CASE("generate_channels entries have unit mean square power") {
    SystemConfig cfg = desk_config();
    cfg.fluid_elements = 250;
    cfg.users = 200;
    cfg.bs_antennas = 200;
    cfg.subframes = 250;
    RandomStream rng(100);
    const ChannelSet ch = generate_channels(cfg, rng);
    const double n = double(ch.g.size() + ch.h.size());
    CHECK(n >= 1e5);
    const double power = (ch.g.squaredNorm() + ch.h.squaredNorm()) / n;
    CHECK(power == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("build_phase_matrix small case and semi-unitarity") {
    const CMatrix phi2 = build_phase_matrix(2, 2);
    CMatrix expect(2, 2);
    expect << 1, 1, 1, -1;
    CHECK((phi2 - expect).norm() <= 1e-15);

    const CMatrix phi = build_phase_matrix(12, 12);
    const double dev = (phi.adjoint() * phi - 12.0 * CMatrix::Identity(12, 12)).norm();
    CHECK(dev <= 1e-12 * 12.0 * std::sqrt(12.0));
    for (Index c = 0; c < phi.cols(); ++c)
        for (Index r = 0; r < phi.rows(); ++r)
            CHECK(std::abs(phi(r, c)) == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(build_phase_matrix(3, 4), ConfigError);
}

TEST_CASE("build_pilot_matrix orthogonality") {
    const CMatrix xp = build_pilot_matrix(4, 4);
    CHECK((xp * xp.adjoint() - 4.0 * CMatrix::Identity(4, 4)).norm() <= 1e-12);

    const CMatrix row = build_pilot_matrix(1, 3);
    CHECK((row - CMatrix::Ones(1, 3)).norm() <= 1e-15);

    const CMatrix xp24 = build_pilot_matrix(2, 4);
    const CMatrix gram = xp24 * xp24.adjoint();
    CHECK(std::abs(gram(0, 1)) <= 1e-13);
    CHECK(gram(0, 0).real() == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(gram(1, 1).real() == doctest::Approx(4.0).epsilon(1e-13));

    CHECK_THROWS_AS(build_pilot_matrix(4, 3), ConfigError);
}

TEST_CASE("build_preset_grid geometry") {
    SystemConfig cfg = desk_config();
    cfg.fluid_elements = 4;
    cfg.area_side = 2.0;  // tile side 1.0
    cfg.preset_positions = 1;
    PresetGrid g1 = build_preset_grid(cfg);
    REQUIRE(g1.size() == 4);
    REQUIRE(g1[0].size() == 1);
    CHECK(g1[0][0].x == doctest::Approx(0.5));
    CHECK(g1[0][0].y == doctest::Approx(0.5));

    cfg.preset_positions = 4;
    PresetGrid g4 = build_preset_grid(cfg);
    REQUIRE(g4[0].size() == 4);
    CHECK(g4[0][0].x == doctest::Approx(0.25));
    CHECK(g4[0][1].x == doctest::Approx(0.75));
    CHECK(g4[0][2].y == doctest::Approx(0.75));
    // spacing is tile/2
    CHECK(g4[0][1].x - g4[0][0].x == doctest::Approx(0.5));
}

TEST_CASE("preset grid points stay inside their tile") {
    RandomStream rng(7);
    for (int rep = 0; rep < 10; ++rep) {
        SystemConfig cfg = desk_config();
        cfg.fluid_elements = 1 + int(rng.below(20));
        cfg.preset_positions = std::max(cfg.blocks, 1 + int(rng.below(30)));
        cfg.area_side = 0.1 + rng.uniform01();
        const double tile = cfg.area_side / std::sqrt(double(cfg.fluid_elements));
        const int per_row = int(std::ceil(std::sqrt(double(cfg.fluid_elements))));
        const PresetGrid grid = build_preset_grid(cfg);
        for (int m = 0; m < cfg.fluid_elements; ++m) {
            const double x0 = (m % per_row) * tile, y0 = (m / per_row) * tile;
            for (const Point2& p : grid[m]) {
                CHECK(p.x >= x0);
                CHECK(p.x <= x0 + tile + 1e-12);
                CHECK(p.y >= y0);
                CHECK(p.y <= y0 + tile + 1e-12);
            }
        }
    }
}

TEST_CASE("draw_motion_schedule picks distinct positions and unit-modulus phases") {
    SystemConfig cfg = desk_config();
    RandomStream rng(8);
    const PresetGrid grid = build_preset_grid(cfg);
    const MotionSchedule sched = draw_motion_schedule(grid, cfg, rng);
    CHECK(sched.t.rows() == cfg.blocks);
    CHECK(sched.t.cols() == cfg.fluid_elements);
    for (Index m = 0; m < sched.t.cols(); ++m) {
        for (Index k = 0; k < sched.t.rows(); ++k) {
            CHECK(std::abs(sched.t(k, m)) == doctest::Approx(1.0).epsilon(1e-14));
            // phase formula: t = exp(-i 2 pi |p| / lambda)
            const Complex expect =
                std::polar(1.0, -2.0 * M_PI * sched.dist(k, m) / cfg.wavelength);
            CHECK(std::abs(sched.t(k, m) - expect) <= 1e-14);
            for (Index k2 = k + 1; k2 < sched.t.rows(); ++k2) {
                const bool same = sched.point(k, m).x == sched.point(k2, m).x &&
                                  sched.point(k, m).y == sched.point(k2, m).y;
                CHECK_FALSE(same);
            }
        }
    }

    SystemConfig bad = cfg;
    bad.preset_positions = cfg.blocks - 1;
    CHECK_THROWS_AS(draw_motion_schedule(grid, bad, rng), ConfigError);
}

TEST_CASE("motion phase wraps: full and half wavelength distances") {
    // distance = lambda gives t = 1, distance = lambda/2 gives t = -1
    const double lambda = 0.1;
    const Complex full = std::polar(1.0, -2.0 * M_PI * lambda / lambda);
    const Complex half = std::polar(1.0, -2.0 * M_PI * (lambda / 2.0) / lambda);
    CHECK(std::abs(full - Complex(1.0, 0.0)) <= 1e-15);
    CHECK(std::abs(half - Complex(-1.0, 0.0)) <= 1e-15);
}

TEST_CASE("perturb_positions with zero error is bit-exact") {
    SystemConfig cfg = desk_config();
    RandomStream rng(9);
    const PresetGrid grid = build_preset_grid(cfg);
    const MotionSchedule sched = draw_motion_schedule(grid, cfg, rng);
    const RealizedMotion real = perturb_positions(sched, 0.0, cfg.wavelength, rng);
    CHECK((real.t - sched.t).norm() == 0.0);
    CHECK((real.dist - sched.dist).norm() == 0.0);
}

TEST_CASE("perturb_positions phase-error statistics match the Gaussian model") {
    // sigma_pos = lambda/20 means phase std 2*pi/20 ~ 0.314 rad and
    // E|t_real - t_cmd|^2 = 2 - 2 exp(-sigma_phi^2 / 2).
    const double lambda = 0.25, sigma_pos = 0.05;
    MotionSchedule sched;
    const Index k = 250, m = 400;  // 1e5 draws
    sched.dist = RMatrix::Constant(k, m, 3.0 * lambda);
    sched.t.resize(k, m);
    for (Index c = 0; c < m; ++c)
        for (Index r = 0; r < k; ++r)
            sched.t(r, c) = std::polar(1.0, -2.0 * M_PI * sched.dist(r, c) / lambda);

    RandomStream rng(10);
    const RealizedMotion real = perturb_positions(sched, sigma_pos, lambda, rng);

    double phase_var = 0.0;
    for (Index c = 0; c < m; ++c)
        for (Index r = 0; r < k; ++r) {
            const double dphase =
                2.0 * M_PI * (real.dist(r, c) - sched.dist(r, c)) / lambda;
            phase_var += dphase * dphase;
        }
    phase_var /= double(k * m);
    const double sigma_phi = 2.0 * M_PI * sigma_pos;
    CHECK(std::sqrt(phase_var) == doctest::Approx(sigma_phi).epsilon(0.02));

    const double mean_sq = (real.t - sched.t).squaredNorm() / double(k * m);
    const double expect = 2.0 - 2.0 * std::exp(-sigma_phi * sigma_phi / 2.0);
    CHECK(mean_sq == doctest::Approx(expect).epsilon(0.02));
}

TEST_CASE("synthesize_received noiseless blocks equal the exact product") {
    SystemConfig cfg = desk_config();
    cfg.snr_db = kInf;
    RandomStream rng(11);
    const ChannelSet ch = generate_channels(cfg, rng);
    const FrisProtocol proto = make_protocol(cfg, rng);
    const ReceivedSignal sig = synthesize_received(ch, proto, cfg.snr_db, rng);
    CHECK(sig.noise_var == 0.0);
    for (Index j = 0; j < proto.phi.rows(); ++j)
        for (Index k = 0; k < proto.t_real.rows(); ++k) {
            const CVector w =
                hadamard(proto.phi.row(j).transpose(), proto.t_real.row(k).transpose());
            const CMatrix ref = ch.h * w.asDiagonal() * ch.g * proto.pilots;
            CHECK((sig.y_raw.slice(k, j) - ref).norm() <= 1e-13 * ref.norm());
        }
}

TEST_CASE("synthesize_received scalar case reduces to y = h g") {
    SystemConfig cfg;
    cfg.fluid_elements = 1;
    cfg.users = 1;
    cfg.bs_antennas = 1;
    cfg.symbols_per_block = 1;
    cfg.blocks = 1;
    cfg.subframes = 1;
    cfg.preset_positions = 1;
    cfg.snr_db = kInf;
    RandomStream rng(12);
    const ChannelSet ch = generate_channels(cfg, rng);
    FrisProtocol proto = make_protocol(cfg, rng);
    proto.cmd.t = CMatrix::Ones(1, 1);  // spec'd toy: phi = t = 1
    proto.t_real = proto.cmd.t;
    REQUIRE(proto.phi(0, 0) == Complex(1.0, 0.0));
    REQUIRE(proto.pilots(0, 0) == Complex(1.0, 0.0));
    const ReceivedSignal sig = synthesize_received(ch, proto, cfg.snr_db, rng);
    CHECK(std::abs(sig.y_raw(0, 0, 0, 0) - ch.h(0, 0) * ch.g(0, 0)) <= 1e-15);
}

TEST_CASE("synthesize_received per-entry signal power is M*Q") {
    SystemConfig cfg;
    cfg.fluid_elements = 4;
    cfg.users = 2;
    cfg.bs_antennas = 3;
    cfg.symbols_per_block = 2;
    cfg.blocks = 2;
    cfg.subframes = 4;
    cfg.preset_positions = 4;
    cfg.snr_db = kInf;
    validate(cfg);
    double acc = 0.0;
    std::size_t n = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        RandomStream rng = RandomStream::derive(13, trial);
        const ChannelSet ch = generate_channels(cfg, rng);
        const FrisProtocol proto = make_protocol(cfg, rng);
        const ReceivedSignal sig = synthesize_received(ch, proto, cfg.snr_db, rng);
        acc += sig.y_raw.data().squaredNorm();
        n += sig.y_raw.size();
    }
    const double power = acc / double(n);
    CHECK(power == doctest::Approx(double(cfg.fluid_elements * cfg.users)).epsilon(0.05));
}

TEST_CASE("noise variance follows the SNR definition") {
    SystemConfig cfg = desk_config();
    RandomStream rng(14);
    const ChannelSet ch = generate_channels(cfg, rng);
    const FrisProtocol proto = make_protocol(cfg, rng);
    const ReceivedSignal sig = synthesize_received(ch, proto, 30.0, rng);
    CHECK(sig.noise_var == doctest::Approx(12.0 * 4.0 * 1e-3).epsilon(1e-12));
}

TEST_CASE("noiseless matched-filtered tensor equals the 4-way reconstruction") {
    SystemConfig cfg = desk_config();
    cfg.snr_db = kInf;
    cfg.sigma_pos = 0.05;
    RandomStream rng(15);
    const ChannelSet ch = generate_channels(cfg, rng);
    const FrisProtocol proto = make_protocol(cfg, rng);
    const ReceivedSignal sig = synthesize_received(ch, proto, cfg.snr_db, rng);
    // pilot decorrelation applied manually here to stay inside this module
    Tensor4 y(sig.y_raw.d1(), proto.pilots.rows(), sig.y_raw.d3(), sig.y_raw.d4());
    for (Index j = 0; j < y.d4(); ++j)
        for (Index k = 0; k < y.d3(); ++k)
            y.slice(k, j) = sig.y_raw.slice(k, j) * proto.pilots.adjoint() /
                            double(proto.pilots.cols());
    const Tensor4 ref = parafac4_reconstruct(ch.h, ch.g, proto.t_real, proto.phi);
    CHECK((y.data() - ref.data()).norm() <= 1e-12 * ref.data().norm());
}

TEST_CASE("sub-frame and block structure: permuting phi rows permutes j slices") {
    SystemConfig cfg = desk_config();
    cfg.snr_db = kInf;
    cfg.sigma_pos = 0.05;
    RandomStream rng(16);
    const ChannelSet ch = generate_channels(cfg, rng);
    FrisProtocol proto = make_protocol(cfg, rng);
    const ReceivedSignal base = synthesize_received(ch, proto, cfg.snr_db, rng);

    // reverse the sub-frame order
    FrisProtocol permuted = proto;
    permuted.phi = proto.phi.colwise().reverse();
    const ReceivedSignal perm = synthesize_received(ch, permuted, cfg.snr_db, rng);
    const Index j_total = proto.phi.rows();
    for (Index j = 0; j < j_total; ++j)
        for (Index k = 0; k < proto.t_real.rows(); ++k)
            CHECK((perm.y_raw.slice(k, j) - base.y_raw.slice(k, j_total - 1 - j))
                      .norm() == 0.0);

    // reverse the block order
    FrisProtocol kperm = proto;
    kperm.t_real = proto.t_real.colwise().reverse();
    const ReceivedSignal permk = synthesize_received(ch, kperm, cfg.snr_db, rng);
    const Index k_total = proto.t_real.rows();
    for (Index j = 0; j < j_total; ++j)
        for (Index k = 0; k < k_total; ++k)
            CHECK((permk.y_raw.slice(k, j) - base.y_raw.slice(k_total - 1 - k, j))
                      .norm() == 0.0);
}

TEST_CASE("synthesis is deterministic for identical (cfg, seed)") {
    SystemConfig cfg = desk_config();
    cfg.sigma_pos = 0.05;
    auto draw = [&cfg] {
        RandomStream rng(17);
        const ChannelSet ch = generate_channels(cfg, rng);
        const FrisProtocol proto = make_protocol(cfg, rng);
        return synthesize_received(ch, proto, cfg.snr_db, rng);
    };
    const ReceivedSignal a = draw(), b = draw();
    CHECK((a.y_raw.data() - b.y_raw.data()).norm() == 0.0);
}

TEST_CASE("config validation catches each inconsistency") {
    SystemConfig cfg = desk_config();
    CHECK_NOTHROW(validate(cfg));
    SystemConfig bad = cfg;
    bad.symbols_per_block = cfg.users - 1;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = cfg;
    bad.subframes = cfg.fluid_elements - 1;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = cfg;
    bad.preset_positions = cfg.blocks - 1;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = cfg;
    bad.sigma_pos = -0.1;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = cfg;
    bad.trials = 0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = cfg;
    bad.wavelength = 0.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
}
