#pragma once

#include "frisce/types.hpp"

namespace frisce {

struct SvdRank1 {
    CVector u;     // unit norm, length rows(X)
    CVector v;     // unit norm, length cols(X)
    double sigma;  // >= 0
};

// Dominant singular triple of X: sigma*u*v^H is the best rank-1 approximation
// in Frobenius norm. Computed by one-sided Jacobi orthogonalization, which is
// exact for the tiny dense matrices this library works with.
// Throws DegenerateColumnError on an all-zero input and ConvergenceError if
// the sweep cap is hit (never observed in practice).
SvdRank1 rank1_svd(const CMatrix& x);

struct Rank1Triple {
    CVector u1;    // unit norm, length d1
    CVector u2;    // unit norm, length d2
    CVector u3;    // unit norm, length d3
    Complex core;  // z contracted with u1^H, u2^H, u3^H
};

// Rank-1 truncated HOSVD: u_n is the dominant left singular vector of the
// mode-n unfolding and core = Z x1 u1^H x2 u2^H x3 u3^H. The reconstruction
// core * (u1 o u2 o u3) is within sqrt(3) of the best rank-1 fit.
Rank1Triple hosvd_rank1(const Tensor3& z);

// Mode-n unfoldings used by hosvd_rank1, exposed for tests.
CMatrix unfold_mode1(const Tensor3& z);  // d1 x d2*d3
CMatrix unfold_mode2(const Tensor3& z);  // d2 x d1*d3
CMatrix unfold_mode3(const Tensor3& z);  // d3 x d1*d2

}  // namespace frisce
