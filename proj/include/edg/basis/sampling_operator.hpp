#pragma once

#include "edg/basis/measurement.hpp"

namespace edg {

namespace detail {

// J M J with J = I - 1 1^T / n.
inline Mat double_center(const Mat& m) {
    Mat out = m;
    out.rowwise() -= out.colwise().mean();
    out.colwise() -= out.rowwise().mean();
    return out;
}

} // namespace detail

/// Sampling operator
///   Q(X) = (L/m) sum_{l <= m} <X, w_l> v_l + sum_i <X, w_(i,i)> v_(i,i).
/// The L/m factor scales only the sampled part, which makes Q unbiased for
/// uniform sampling and the identity on S_n when every pair is observed once.
///
/// sum_l c_l v_l = -J (C + C^T) J / 2 for the sparse C with c_l at (i_l, j_l),
/// and sum_i d_i v_(i,i) = diag(d) - J diag(d) J; total cost O(m + n^2).
inline SymMatrix apply_Q_omega(const SampleSet& s, const SymMatrix& X) {
    require_dim(X.n() == s.n(), "apply_Q_omega: dimension mismatch");
    const Index n = s.n();
    const double scale = static_cast<double>(s.L()) / static_cast<double>(s.m());
    const Mat& x = X.mat();
    Mat c = Mat::Zero(n, n);
    for (Index l = 0; l < s.m(); ++l) {
        const auto& p = s.pair(l);
        const double coef = scale * (x(p.i, p.i) + x(p.j, p.j) - 2.0 * x(p.i, p.j));
        c(p.i, p.j) += coef;
        c(p.j, p.i) += coef;
    }
    Mat out = -0.5 * detail::double_center(c);
    const Vec d = x.rowwise().sum();
    Mat dg = d.asDiagonal();
    out += dg - detail::double_center(dg);
    return SymMatrix(out, 1e-8);
}

/// Adjoint of apply_Q_omega in the Frobenius inner product:
///   Q*(X) = (L/m) sum_l <X, v_l> w_l + sum_i <X, v_(i,i)> w_(i,i),
/// using <X, v_(i,j)> = -(J X J)_ij and <X, v_(i,i)> = X_ii - (J X J)_ii.
inline SymMatrix apply_Q_omega_adjoint(const SampleSet& s, const SymMatrix& X) {
    require_dim(X.n() == s.n(), "apply_Q_omega_adjoint: dimension mismatch");
    const Index n = s.n();
    const double scale = static_cast<double>(s.L()) / static_cast<double>(s.m());
    const Mat jxj = detail::double_center(X.mat());
    Vec y(s.m() + n);
    for (Index l = 0; l < s.m(); ++l) {
        const auto& p = s.pair(l);
        y(l) = -scale * jxj(p.i, p.j);
    }
    y.tail(n) = X.mat().diagonal() - jxj.diagonal();
    return apply_A_star(s, y);
}

} // namespace edg
