#pragma once

#include "frisce/types.hpp"

namespace frisce {

// Column-wise Kronecker (Khatri-Rao) product of A (I x M) and B (K x M).
// Result is IK x M with entry (i*K + k, m) = A(i,m) * B(k,m).
CMatrix khatri_rao(const CMatrix& a, const CMatrix& b);

// Kronecker product of two vectors: result[i*q + j] = a[i] * b[j].
CVector kron_vec(const CVector& a, const CVector& b);

// Elementwise product of two equal-length vectors.
CVector hadamard(const CVector& a, const CVector& b);

// Unfolds Y (Mr x Q x K x J) into the QMr x JK matrix with
// Y1(q*Mr + mr, j*K + k) = Y(mr,q,k,j). For a noiseless training tensor this
// satisfies Y1 = (G^T kr H) (Phi kr T)^T exactly.
CMatrix unfold_y1(const Tensor4& y);

// Unfolds Y (Mr x Q x K x J) into the KQMr x J matrix with
// Y2(k*Q*Mr + q*Mr + mr, j) = Y(mr,q,k,j), so noiseless Y2 = (T kr G^T kr H) Phi^T.
CMatrix unfold_y2(const Tensor4& y);

// Reshapes a length-K*Q*Mr vector into an Mr x Q x K tensor,
// tensor(mr,q,k) = z[k*Q*Mr + q*Mr + mr]. For z = t kron g kron h the result
// is the rank-1 tensor h o g o t.
Tensor3 fold3(const CVector& z, Index mr, Index q, Index k);

// Rank-M 4-way reconstruction: Y(mr,q,k,j) = sum_m H(mr,m) G(m,q) T(k,m) Phi(j,m).
// The (j,k) slice equals H diag(phi_j had t_k) G.
Tensor4 parafac4_reconstruct(const CMatrix& h, const CMatrix& g, const CMatrix& t,
                             const CMatrix& phi);

}  // namespace frisce
