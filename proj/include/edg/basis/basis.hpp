#pragma once

#include <vector>

#include "edg/basis/sample_set.hpp"
#include "edg/core/sym_matrix.hpp"

namespace edg {

/// Primal basis element w_alpha.
///   off-diagonal (i,j):  e_i e_i^T + e_j e_j^T - e_i e_j^T - e_j e_i^T
///   diagonal (i,i):      (e_i 1^T + 1 e_i^T) / 2
/// so <w_(i,j), X> = X_ii + X_jj - 2 X_ij and <w_(i,i), X> = (X 1)_i.
inline SymMatrix primal_basis_element(const IndexPair& a, Index n) {
    a.validate(n);
    Mat w = Mat::Zero(n, n);
    if (a.is_diagonal()) {
        w.row(a.i).array() += 0.5;
        w.col(a.i).array() += 0.5;
    } else {
        w(a.i, a.i) = 1.0;
        w(a.j, a.j) = 1.0;
        w(a.i, a.j) = -1.0;
        w(a.j, a.i) = -1.0;
    }
    return SymMatrix(w);
}

/// Centered unit vector a_i = e_i - 1/n.
inline Vec centered_unit(Index i, Index n) {
    Vec a = Vec::Constant(n, -1.0 / static_cast<double>(n));
    a(i) += 1.0;
    return a;
}

/// Dual basis element v_alpha, bi-orthogonal to the primal basis over all of
/// the off-diagonal and diagonal index pairs.
///   off-diagonal (i,j):  -(a_i a_j^T + a_j a_i^T) / 2
///   diagonal (i,i):      e_i e_i^T - a_i a_i^T
inline SymMatrix dual_basis_element(const IndexPair& a, Index n) {
    a.validate(n);
    const Vec ai = centered_unit(a.i, n);
    if (a.is_diagonal()) {
        Mat v = -ai * ai.transpose();
        v(a.i, a.i) += 1.0;
        return SymMatrix(v);
    }
    const Vec aj = centered_unit(a.j, n);
    return SymMatrix(Mat(-0.5 * (ai * aj.transpose() + aj * ai.transpose())));
}

/// All index pairs: the L off-diagonal ones in row-major order, then the n diagonal ones.
inline std::vector<IndexPair> all_index_pairs(Index n, bool with_diagonal = true) {
    std::vector<IndexPair> out;
    out.reserve(static_cast<std::size_t>(pair_count(n) + (with_diagonal ? n : 0)));
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) out.push_back({i, j});
    if (with_diagonal)
        for (Index i = 0; i < n; ++i) out.push_back({i, i});
    return out;
}

} // namespace edg
