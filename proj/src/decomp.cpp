#include "frisce/decomp.hpp"

#include <cmath>

namespace frisce {

namespace {

constexpr int kMaxSweeps = 64;
constexpr double kOrthTol = 1e-13;

// One-sided (Hestenes) Jacobi on a matrix with cols <= rows: unitary right
// rotations orthogonalize the columns; singular values are the final column
// norms and the accumulated rotations give the right singular vectors.
SvdRank1 jacobi_dominant(CMatrix x) {
    const Index n = x.cols();
    CMatrix v = CMatrix::Identity(n, n);

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double worst = 0.0;
        for (Index i = 0; i + 1 < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                const double a = x.col(i).squaredNorm();
                const double b = x.col(j).squaredNorm();
                const Complex c = x.col(i).dot(x.col(j));  // x_i^H x_j
                const double ca = std::abs(c);
                if (a == 0.0 || b == 0.0) continue;
                const double rel = ca / std::sqrt(a * b);
                worst = std::max(worst, rel);
                if (rel <= kOrthTol) continue;

                // Unitary rotation zeroing the off-diagonal of the 2x2 Gram
                // block [[a, c], [conj(c), b]].
                const Complex phase = c / ca;  // e^{i arg c}
                const double zeta = (a - b) / (2.0 * ca);
                const double sg = zeta >= 0.0 ? 1.0 : -1.0;
                const double t = sg / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;

                const CVector xi = x.col(i);
                x.col(i) = cs * xi + sn * std::conj(phase) * x.col(j);
                x.col(j) = -sn * phase * xi + cs * x.col(j);
                const CVector vi = v.col(i);
                v.col(i) = cs * vi + sn * std::conj(phase) * v.col(j);
                v.col(j) = -sn * phase * vi + cs * v.col(j);
            }
        }
        if (worst <= kOrthTol) {
            Index best = 0;
            double best_norm = -1.0;
            for (Index i = 0; i < n; ++i) {
                const double cn = x.col(i).norm();
                if (cn > best_norm) {
                    best_norm = cn;
                    best = i;
                }
            }
            return {x.col(best) / best_norm, v.col(best), best_norm};
        }
    }
    throw ConvergenceError("rank1_svd: Jacobi sweep cap (" +
                           std::to_string(kMaxSweeps) + ") reached");
}

}  // namespace

SvdRank1 rank1_svd(const CMatrix& x) {
    if (x.norm() == 0.0) {
        throw DegenerateColumnError("rank1_svd: degenerate column (all-zero input " +
                                    shape_str(x.rows(), x.cols()) + ")");
    }
    if (x.cols() <= x.rows()) return jacobi_dominant(x);
    // Wide input: factor the adjoint and swap the singular vectors.
    SvdRank1 r = jacobi_dominant(x.adjoint());
    return {r.v, r.u, r.sigma};
}

CMatrix unfold_mode1(const Tensor3& z) {
    return Eigen::Map<const CMatrix>(z.data().data(), z.d1(), z.d2() * z.d3());
}

CMatrix unfold_mode2(const Tensor3& z) {
    CMatrix out(z.d2(), z.d1() * z.d3());
    for (Index k = 0; k < z.d3(); ++k)
        for (Index j = 0; j < z.d2(); ++j)
            for (Index i = 0; i < z.d1(); ++i) out(j, i + z.d1() * k) = z(i, j, k);
    return out;
}

CMatrix unfold_mode3(const Tensor3& z) {
    return Eigen::Map<const CMatrix>(z.data().data(), z.d1() * z.d2(), z.d3())
        .transpose();
}

Rank1Triple hosvd_rank1(const Tensor3& z) {
    if (z.norm() == 0.0) {
        throw DegenerateColumnError("hosvd_rank1: degenerate column (zero tensor)");
    }
    Rank1Triple out;
    out.u1 = rank1_svd(unfold_mode1(z)).u;
    out.u2 = rank1_svd(unfold_mode2(z)).u;
    out.u3 = rank1_svd(unfold_mode3(z)).u;

    Complex core = 0.0;
    for (Index k = 0; k < z.d3(); ++k)
        for (Index j = 0; j < z.d2(); ++j)
            for (Index i = 0; i < z.d1(); ++i)
                core += std::conj(out.u1[i] * out.u2[j] * out.u3[k]) * z(i, j, k);
    out.core = core;
    return out;
}

}  // namespace frisce
