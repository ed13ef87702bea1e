#include "frisce/tensor_ops.hpp"

namespace frisce {

CMatrix khatri_rao(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.cols()) {
        throw DimensionError("khatri_rao: column count mismatch: A is " +
                             shape_str(a.rows(), a.cols()) + ", B is " +
                             shape_str(b.rows(), b.cols()));
    }
    const Index ia = a.rows(), kb = b.rows(), m = a.cols();
    CMatrix out(ia * kb, m);
    for (Index c = 0; c < m; ++c) {
        for (Index i = 0; i < ia; ++i) {
            out.col(c).segment(i * kb, kb) = a(i, c) * b.col(c);
        }
    }
    return out;
}

CVector kron_vec(const CVector& a, const CVector& b) {
    const Index p = a.size(), q = b.size();
    CVector out(p * q);
    for (Index i = 0; i < p; ++i) out.segment(i * q, q) = a[i] * b;
    return out;
}

CVector hadamard(const CVector& a, const CVector& b) {
    if (a.size() != b.size()) {
        throw DimensionError("hadamard: length mismatch: " + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()));
    }
    return a.cwiseProduct(b);
}

CMatrix unfold_y1(const Tensor4& y) {
    const Index mr = y.d1(), q = y.d2(), k = y.d3(), j = y.d4();
    CMatrix out(q * mr, j * k);
    // Row index (q_outer, mr_inner) matches the column-major layout of each
    // (k,j) slice, so every column is a contiguous copy.
    for (Index jj = 0; jj < j; ++jj) {
        for (Index kk = 0; kk < k; ++kk) {
            out.col(jj * k + kk) =
                Eigen::Map<const CVector>(y.slice(kk, jj).data(), mr * q);
        }
    }
    return out;
}

CMatrix unfold_y2(const Tensor4& y) {
    const Index mr = y.d1(), q = y.d2(), k = y.d3(), j = y.d4();
    CMatrix out(k * q * mr, j);
    for (Index jj = 0; jj < j; ++jj) {
        for (Index kk = 0; kk < k; ++kk) {
            out.col(jj).segment(kk * q * mr, q * mr) =
                Eigen::Map<const CVector>(y.slice(kk, jj).data(), mr * q);
        }
    }
    return out;
}

Tensor3 fold3(const CVector& z, Index mr, Index q, Index k) {
    if (z.size() != mr * q * k) {
        throw DimensionError("fold3: vector length " + std::to_string(z.size()) +
                             " does not match dims " + std::to_string(mr) + "x" +
                             std::to_string(q) + "x" + std::to_string(k));
    }
    // The target layout (mr inner, q middle, k outer) is exactly the linear
    // order of z, so folding is a straight copy.
    Tensor3 out(mr, q, k);
    out.data() = z;
    return out;
}

Tensor4 parafac4_reconstruct(const CMatrix& h, const CMatrix& g, const CMatrix& t,
                             const CMatrix& phi) {
    const Index m = h.cols();
    if (g.rows() != m || t.cols() != m || phi.cols() != m) {
        throw DimensionError(
            "parafac4_reconstruct: shared dimension mismatch: H " +
            shape_str(h.rows(), h.cols()) + ", G " + shape_str(g.rows(), g.cols()) +
            ", T " + shape_str(t.rows(), t.cols()) + ", Phi " +
            shape_str(phi.rows(), phi.cols()));
    }
    Tensor4 y(h.rows(), g.cols(), t.rows(), phi.rows());
    for (Index jj = 0; jj < phi.rows(); ++jj) {
        for (Index kk = 0; kk < t.rows(); ++kk) {
            const CVector w =
                phi.row(jj).transpose().cwiseProduct(t.row(kk).transpose());
            y.slice(kk, jj) = h * w.asDiagonal() * g;
        }
    }
    return y;
}

}  // namespace frisce
