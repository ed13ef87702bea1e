#include "frisce/estimators.hpp"

#include <cmath>

namespace frisce {

namespace {

constexpr double kDegenerateRel = 1e-14;

void check_pilots_orthogonal(const CMatrix& pilots) {
    const Index q = pilots.rows();
    const double ts = static_cast<double>(pilots.cols());
    const double dev =
        (pilots * pilots.adjoint() - ts * CMatrix::Identity(q, q)).norm();
    if (dev > 1e-9 * ts * std::sqrt(static_cast<double>(q))) {
        throw ConfigError("matched_filter: pilots are not row-orthogonal "
                          "(|Xp Xp^H - Ts I|_F = " + std::to_string(dev) + ")");
    }
}

Complex principal_cbrt(Complex c) {
    return std::polar(std::cbrt(std::abs(c)), std::arg(c) / 3.0);
}

// argmin_alpha |alpha * est - truth|  (closed form ratio of inner products)
Complex ls_scale(const CVector& est, const CVector& truth) {
    return est.dot(truth) / est.squaredNorm();
}

}  // namespace

Tensor4 matched_filter(const ReceivedSignal& sig, const CMatrix& pilots) {
    check_pilots_orthogonal(pilots);
    const Tensor4& raw = sig.y_raw;
    if (raw.d2() != pilots.cols()) {
        throw DimensionError("matched_filter: pilot length " +
                             std::to_string(pilots.cols()) +
                             " does not match block width " + std::to_string(raw.d2()));
    }
    const double inv_ts = 1.0 / static_cast<double>(pilots.cols());
    Tensor4 y(raw.d1(), pilots.rows(), raw.d3(), raw.d4());
    for (Index j = 0; j < raw.d4(); ++j)
        for (Index k = 0; k < raw.d3(); ++k)
            y.slice(k, j) = inv_ts * raw.slice(k, j) * pilots.adjoint();
    return y;
}

CMatrix estimate_theta_ls(const Tensor4& y, const CMatrix& phi,
                          const CMatrix& t_assumed) {
    if (phi.rows() != y.d4() || t_assumed.rows() != y.d3() ||
        phi.cols() != t_assumed.cols()) {
        throw DimensionError("estimate_theta_ls: Phi " +
                             shape_str(phi.rows(), phi.cols()) + " / T " +
                             shape_str(t_assumed.rows(), t_assumed.cols()) +
                             " inconsistent with tensor dims");
    }
    const double scale =
        1.0 / static_cast<double>(phi.rows() * t_assumed.rows());
    return scale * unfold_y1(y) * khatri_rao(phi, t_assumed).conjugate();
}

CMatrix estimate_z_ls(const Tensor4& y, const CMatrix& phi) {
    if (phi.rows() != y.d4()) {
        throw DimensionError("estimate_z_ls: Phi " + shape_str(phi.rows(), phi.cols()) +
                             " inconsistent with J=" + std::to_string(y.d4()));
    }
    return (1.0 / static_cast<double>(phi.rows())) * unfold_y2(y) * phi.conjugate();
}

Krf2Estimate krf2(const CMatrix& theta_hat, Index bs_antennas, Index users) {
    if (theta_hat.rows() != bs_antennas * users) {
        throw DimensionError("krf2: Theta_hat has " + std::to_string(theta_hat.rows()) +
                             " rows, expected Mr*Q = " +
                             std::to_string(bs_antennas * users));
    }
    const Index m_total = theta_hat.cols();
    const double floor_norm = kDegenerateRel * theta_hat.norm();
    Krf2Estimate est;
    est.g.resize(m_total, users);
    est.h.resize(bs_antennas, m_total);
    for (Index m = 0; m < m_total; ++m) {
        if (theta_hat.col(m).norm() <= floor_norm) {
            throw DegenerateColumnError("krf2: degenerate column " + std::to_string(m));
        }
        const Eigen::Map<const CMatrix> xm(theta_hat.col(m).data(), bs_antennas, users);
        const SvdRank1 r = rank1_svd(xm);
        const double s = std::sqrt(r.sigma);
        est.h.col(m) = s * r.u;
        est.g.row(m) = s * r.v.adjoint();
    }
    est.theta = khatri_rao(est.g.transpose(), est.h);
    return est;
}

Krf3Estimate krf3(const CMatrix& z_hat, Index bs_antennas, Index users,
                  Index blocks) {
    if (z_hat.rows() != blocks * users * bs_antennas) {
        throw DimensionError("krf3: Z_hat has " + std::to_string(z_hat.rows()) +
                             " rows, expected K*Q*Mr = " +
                             std::to_string(blocks * users * bs_antennas));
    }
    const Index m_total = z_hat.cols();
    const double floor_norm = kDegenerateRel * z_hat.norm();
    Krf3Estimate est;
    est.t.resize(blocks, m_total);
    est.g.resize(m_total, users);
    est.h.resize(bs_antennas, m_total);
    for (Index m = 0; m < m_total; ++m) {
        if (z_hat.col(m).norm() <= floor_norm) {
            throw DegenerateColumnError("krf3: degenerate column " + std::to_string(m));
        }
        const Rank1Triple r = hosvd_rank1(fold3(z_hat.col(m), bs_antennas, users, blocks));
        const Complex c = principal_cbrt(r.core);
        est.h.col(m) = c * r.u1;
        est.g.row(m) = (c * r.u2).transpose();
        est.t.col(m) = c * r.u3;
    }
    est.z = khatri_rao(est.t, khatri_rao(est.g.transpose(), est.h));
    return est;
}

void project_motion_to_unit_modulus(Krf3Estimate& est) {
    for (Index m = 0; m < est.t.cols(); ++m) {
        const double mag = est.t.col(m).cwiseAbs().mean();
        if (mag == 0.0) {
            throw DegenerateColumnError("project_motion_to_unit_modulus: column " +
                                        std::to_string(m));
        }
        for (Index k = 0; k < est.t.rows(); ++k) {
            const double a = std::abs(est.t(k, m));
            if (a > 0.0) est.t(k, m) /= a;
        }
        est.g.row(m) *= mag;
    }
    est.z = khatri_rao(est.t, khatri_rao(est.g.transpose(), est.h));
}

ScaleResolution resolve_scaling(Krf2Estimate& est, const CMatrix& h_true) {
    ScaleResolution res;
    for (Index m = 0; m < est.h.cols(); ++m) {
        if (h_true.col(m).norm() == 0.0 || est.h.col(m).norm() == 0.0) {
            res.skipped.push_back(m);
            continue;
        }
        const Complex alpha = ls_scale(est.h.col(m), h_true.col(m));
        est.h.col(m) *= alpha;
        est.g.row(m) /= alpha;
    }
    return res;
}

ScaleResolution resolve_scaling(Krf3Estimate& est, const CMatrix& g_true,
                                const CMatrix& h_true, const CMatrix& t_true) {
    ScaleResolution res;
    for (Index m = 0; m < est.h.cols(); ++m) {
        if (h_true.col(m).norm() == 0.0 || est.h.col(m).norm() == 0.0 ||
            g_true.row(m).norm() == 0.0 || est.g.row(m).norm() == 0.0 ||
            t_true.col(m).norm() == 0.0) {
            res.skipped.push_back(m);
            continue;
        }
        const Complex alpha = ls_scale(est.h.col(m), h_true.col(m));
        est.h.col(m) *= alpha;
        const Complex beta =
            ls_scale(est.g.row(m).transpose(), g_true.row(m).transpose());
        est.g.row(m) *= beta;
        est.t.col(m) /= alpha * beta;
    }
    return res;
}

double nmse(const CMatrix& estimate, const CMatrix& truth) {
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
        throw DimensionError("nmse: shape mismatch: " +
                             shape_str(estimate.rows(), estimate.cols()) + " vs " +
                             shape_str(truth.rows(), truth.cols()));
    }
    const double denom = truth.squaredNorm();
    if (denom == 0.0) throw Error("nmse: zero truth");
    return (estimate - truth).squaredNorm() / denom;
}

}  // namespace frisce
