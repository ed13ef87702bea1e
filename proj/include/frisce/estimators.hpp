#pragma once

#include "frisce/decomp.hpp"
#include "frisce/model.hpp"
#include "frisce/tensor_ops.hpp"
#include "frisce/types.hpp"

#include <vector>

namespace frisce {

// Pilot decorrelation Y = (1/Ts) Yt Xp^H per block. Requires row-orthogonal
// pilots (Xp Xp^H = Ts I), otherwise the filter is not the exact LS solution.
// Output is Mr x Q x K x J; filtered noise variance is sigma_v^2 / Ts.
Tensor4 matched_filter(const ReceivedSignal& sig, const CMatrix& pilots);

// Combined-channel LS filter: Theta_hat = (1/JK) Y1 conj(Phi kr T_assumed).
// Exact (zero residual) when the noise is zero and T_assumed matches the
// realized motion.
CMatrix estimate_theta_ls(const Tensor4& y, const CMatrix& phi,
                          const CMatrix& t_assumed);

// Motion-augmented LS filter: Z_hat = (1/J) Y2 conj(Phi). Unbiased regardless
// of motion errors, since Phi is electronic and exactly known.
CMatrix estimate_z_ls(const Tensor4& y, const CMatrix& phi);

struct Krf2Estimate {
    CMatrix g;      // M x Q
    CMatrix h;      // Mr x M
    CMatrix theta;  // QMr x M, the rank-1-truncated reconstruction g^T kr h
};

// Two-factor Khatri-Rao factorization: per column m of Theta_hat, the best
// rank-1 fit of its Mr x Q reshape gives h_m and g_m (balanced sqrt(sigma)
// split). Columns with norm < 1e-14 * |Theta_hat|_F are reported degenerate.
Krf2Estimate krf2(const CMatrix& theta_hat, Index bs_antennas, Index users);

struct Krf3Estimate {
    CMatrix t;  // K x M
    CMatrix g;  // M x Q
    CMatrix h;  // Mr x M
    CMatrix z;  // KQMr x M, reconstruction t kr g^T kr h
};

// Three-factor Khatri-Rao factorization via rank-1 truncated HOSVD: column m
// folds to an Mr x Q x K tensor whose dominant mode vectors give h, g, t after
// splitting the core by its principal cube root.
Krf3Estimate krf3(const CMatrix& z_hat, Index bs_antennas, Index users,
                  Index blocks);

// Optional projection to the physical manifold: renormalizes every entry of
// t to unit modulus and folds the mean column magnitude into the matching row
// of g. Off by default in the pipelines; exactness holds only when the column
// magnitudes are uniform (they are, up to noise).
void project_motion_to_unit_modulus(Krf3Estimate& est);

struct ScaleResolution {
    std::vector<Index> skipped;  // columns with zero truth or zero estimate
};

// Removes the per-column complex scaling ambiguity against ground truth:
// alpha_m = argmin |alpha h_hat_m - h_m| applied to h, its inverse to g, so
// the Khatri-Rao product is preserved bit-for-bit.
ScaleResolution resolve_scaling(Krf2Estimate& est, const CMatrix& h_true);

// Same, plus an independent beta per column for g; t absorbs 1/(alpha*beta)
// so the triple product is preserved.
ScaleResolution resolve_scaling(Krf3Estimate& est, const CMatrix& g_true,
                                const CMatrix& h_true, const CMatrix& t_true);

// |estimate - truth|_F^2 / |truth|_F^2. Throws on zero truth.
double nmse(const CMatrix& estimate, const CMatrix& truth);

}  // namespace frisce
