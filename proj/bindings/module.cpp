#include "frisce/decomp.hpp"
#include "frisce/estimators.hpp"
#include "frisce/harness.hpp"
#include "frisce/model.hpp"
#include "frisce/tensor_ops.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

namespace py = pybind11;
using namespace frisce;

namespace {

using FArray = py::array_t<Complex, py::array::f_style | py::array::forcecast>;

Tensor3 tensor3_from(const py::array& a) {
    const FArray arr = FArray::ensure(a);
    if (!arr || arr.ndim() != 3) throw py::value_error("expected a 3-D complex array");
    Tensor3 t(arr.shape(0), arr.shape(1), arr.shape(2));
    std::memcpy(t.data().data(), arr.data(), sizeof(Complex) * t.size());
    return t;
}

Tensor4 tensor4_from(const py::array& a) {
    const FArray arr = FArray::ensure(a);
    if (!arr || arr.ndim() != 4) throw py::value_error("expected a 4-D complex array");
    Tensor4 t(arr.shape(0), arr.shape(1), arr.shape(2), arr.shape(3));
    std::memcpy(t.data().data(), arr.data(), sizeof(Complex) * t.size());
    return t;
}

py::array_t<Complex> to_array(const Tensor3& t) {
    const auto c = static_cast<py::ssize_t>(sizeof(Complex));
    py::array_t<Complex> out({t.d1(), t.d2(), t.d3()},
                             {c, c * t.d1(), c * t.d1() * t.d2()});
    std::memcpy(out.mutable_data(), t.data().data(), sizeof(Complex) * t.size());
    return out;
}

py::array_t<Complex> to_array(const Tensor4& t) {
    const auto c = static_cast<py::ssize_t>(sizeof(Complex));
    py::array_t<Complex> out(
        {t.d1(), t.d2(), t.d3(), t.d4()},
        {c, c * t.d1(), c * t.d1() * t.d2(), c * t.d1() * t.d2() * t.d3()});
    std::memcpy(out.mutable_data(), t.data().data(), sizeof(Complex) * t.size());
    return out;
}

py::object opt(const std::optional<double>& v) {
    return v ? py::cast(*v) : py::none();
}

py::list rows_to_list(const std::vector<ResultRow>& rows) {
    py::list out;
    for (const ResultRow& r : rows) {
        py::dict d;
        d["estimator"] = r.estimator;
        d["sweep_axis"] = r.sweep_axis;
        d["sweep_value"] = r.sweep_value;
        d["trial"] = r.trial;
        d["nmse_theta"] = opt(r.nmse_theta);
        d["nmse_z"] = opt(r.nmse_z);
        d["nmse_G"] = opt(r.nmse_g);
        d["nmse_H"] = opt(r.nmse_h);
        d["nmse_T"] = opt(r.nmse_t);
        d["seed"] = r.seed_used;
        out.append(std::move(d));
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Tensor-based channel estimation for a fluid-RIS assisted MISO uplink";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<DegenerateColumnError>(m, "DegenerateColumnError",
                                                  PyExc_RuntimeError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    py::class_<SystemConfig>(m, "SystemConfig")
        .def(py::init<>())
        .def_readwrite("M", &SystemConfig::fluid_elements)
        .def_readwrite("Q", &SystemConfig::users)
        .def_readwrite("M_r", &SystemConfig::bs_antennas)
        .def_readwrite("T_s", &SystemConfig::symbols_per_block)
        .def_readwrite("K", &SystemConfig::blocks)
        .def_readwrite("J", &SystemConfig::subframes)
        .def_readwrite("wavelength", &SystemConfig::wavelength)
        .def_readwrite("N", &SystemConfig::preset_positions)
        .def_readwrite("area_side", &SystemConfig::area_side)
        .def_readwrite("snr_db", &SystemConfig::snr_db)
        .def_readwrite("sigma_pos", &SystemConfig::sigma_pos)
        .def_readwrite("trials", &SystemConfig::trials)
        .def_readwrite("seed", &SystemConfig::seed)
        .def("__repr__", [](const SystemConfig& c) {
            return "SystemConfig(M=" + std::to_string(c.fluid_elements) +
                   ", Q=" + std::to_string(c.users) +
                   ", M_r=" + std::to_string(c.bs_antennas) +
                   ", T_s=" + std::to_string(c.symbols_per_block) +
                   ", K=" + std::to_string(c.blocks) +
                   ", J=" + std::to_string(c.subframes) + ")";
        });

    // structured products and unfoldings
    m.def("khatri_rao", &khatri_rao, py::arg("a"), py::arg("b"),
          "Column-wise Kronecker product of two matrices with equal column count.");
    m.def("kron_vec", &kron_vec, py::arg("a"), py::arg("b"));
    m.def("hadamard", &hadamard, py::arg("a"), py::arg("b"));
    m.def(
        "unfold_y1",
        [](const py::array& y) { return unfold_y1(tensor4_from(y)); }, py::arg("y"),
        "QMr x JK unfolding of an Mr x Q x K x J tensor.");
    m.def(
        "unfold_y2",
        [](const py::array& y) { return unfold_y2(tensor4_from(y)); }, py::arg("y"),
        "KQMr x J unfolding of an Mr x Q x K x J tensor.");
    m.def(
        "fold3",
        [](const CVector& z, Index mr, Index q, Index k) {
            return to_array(fold3(z, mr, q, k));
        },
        py::arg("z"), py::arg("mr"), py::arg("q"), py::arg("k"));
    m.def(
        "parafac4_reconstruct",
        [](const CMatrix& h, const CMatrix& g, const CMatrix& t, const CMatrix& phi) {
            return to_array(parafac4_reconstruct(h, g, t, phi));
        },
        py::arg("h"), py::arg("g"), py::arg("t"), py::arg("phi"));

    // rank-1 extraction
    m.def(
        "rank1_svd",
        [](const CMatrix& x) {
            const SvdRank1 r = rank1_svd(x);
            return py::make_tuple(r.u, r.v, r.sigma);
        },
        py::arg("x"), "Dominant singular triple (u, v, sigma).");
    m.def(
        "hosvd_rank1",
        [](const py::array& z) {
            const Rank1Triple r = hosvd_rank1(tensor3_from(z));
            return py::make_tuple(r.u1, r.u2, r.u3, r.core);
        },
        py::arg("z"), "Rank-1 truncated HOSVD: (u1, u2, u3, core).");

    // scenario generation
    m.def("build_phase_matrix", &build_phase_matrix, py::arg("J"), py::arg("M"));
    m.def("build_pilot_matrix", &build_pilot_matrix, py::arg("Q"), py::arg("T_s"));
    m.def(
        "generate_channels",
        [](const SystemConfig& cfg, std::uint64_t seed) {
            RandomStream rng(seed);
            const ChannelSet ch = generate_channels(cfg, rng);
            return py::make_tuple(ch.g, ch.h);
        },
        py::arg("cfg"), py::arg("seed"), "Draw (G, H) with i.i.d. CN(0,1) entries.");
    m.def(
        "simulate_trial",
        [](const SystemConfig& cfg, std::uint64_t seed) {
            validate(cfg);
            RandomStream rng(seed);
            const ChannelSet ch = generate_channels(cfg, rng);
            const FrisProtocol proto = make_protocol(cfg, rng);
            const ReceivedSignal sig = synthesize_received(ch, proto, cfg.snr_db, rng);
            py::dict d;
            d["G"] = ch.g;
            d["H"] = ch.h;
            d["phi"] = proto.phi;
            d["pilots"] = proto.pilots;
            d["t_cmd"] = proto.cmd.t;
            d["t_real"] = proto.t_real;
            d["dist_cmd"] = proto.cmd.dist;
            d["dist_real"] = proto.dist_real;
            d["y_raw"] = to_array(sig.y_raw);
            d["noise_var"] = sig.noise_var;
            d["y"] = to_array(matched_filter(sig, proto.pilots));
            return d;
        },
        py::arg("cfg"), py::arg("seed"),
        "One full scenario draw: channels, protocol, raw and filtered tensors.");

    // estimation pipelines
    m.def(
        "matched_filter",
        [](const py::array& y_raw, const CMatrix& pilots) {
            ReceivedSignal sig;
            sig.y_raw = tensor4_from(y_raw);
            sig.noise_var = 0.0;
            return to_array(matched_filter(sig, pilots));
        },
        py::arg("y_raw"), py::arg("pilots"));
    m.def(
        "estimate_theta_ls",
        [](const py::array& y, const CMatrix& phi, const CMatrix& t_assumed) {
            return estimate_theta_ls(tensor4_from(y), phi, t_assumed);
        },
        py::arg("y"), py::arg("phi"), py::arg("t_assumed"));
    m.def(
        "estimate_z_ls",
        [](const py::array& y, const CMatrix& phi) {
            return estimate_z_ls(tensor4_from(y), phi);
        },
        py::arg("y"), py::arg("phi"));
    m.def(
        "krf2",
        [](const CMatrix& theta_hat, Index mr, Index q) {
            const Krf2Estimate est = krf2(theta_hat, mr, q);
            return py::make_tuple(est.g, est.h, est.theta);
        },
        py::arg("theta_hat"), py::arg("mr"), py::arg("q"),
        "Two-factor Khatri-Rao factorization: (G, H, reconstructed Theta).");
    m.def(
        "krf3",
        [](const CMatrix& z_hat, Index mr, Index q, Index k) {
            const Krf3Estimate est = krf3(z_hat, mr, q, k);
            return py::make_tuple(est.t, est.g, est.h, est.z);
        },
        py::arg("z_hat"), py::arg("mr"), py::arg("q"), py::arg("k"),
        "Three-factor Khatri-Rao factorization: (T, G, H, reconstructed Z).");
    m.def("nmse", &nmse, py::arg("estimate"), py::arg("truth"));

    // harness
    m.def(
        "run_experiment",
        [](const std::string& config_json, int threads) {
            ExperimentConfig cfg;
            std::vector<ResultRow> rows;
            {
                py::gil_scoped_release release;
                cfg = parse_experiment_config(config_json);
                rows = run_experiment(cfg, threads);
            }
            return rows_to_list(rows);
        },
        py::arg("config_json"), py::arg("threads") = 1,
        "Run a Monte-Carlo sweep from a JSON config string; returns rows as dicts.");
    m.def(
        "csv_from_rows",
        [](const std::string& config_json, int threads) {
            py::gil_scoped_release release;
            const ExperimentConfig cfg = parse_experiment_config(config_json);
            return csv_string(run_experiment(cfg, threads));
        },
        py::arg("config_json"), py::arg("threads") = 1,
        "Run a sweep and return the results CSV as a string.");

    m.attr("__version__") = "0.1.0";
}
