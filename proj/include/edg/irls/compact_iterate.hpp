#pragma once

#include <cmath>

#include "edg/tangent/tangent.hpp"

namespace edg {

/// Iterate in sparse-plus-low-rank form X = A*(residual) + P_T(coeffs).
///
/// `U` has zero columns (and `coeffs` is empty) for the first iterate, which is
/// the minimum-norm interpolant A*(A A*)^-1 y.
struct CompactIterate {
    Vec residual;          ///< length m + n
    Mat U;                 ///< n x r
    TangentCoeffs coeffs;  ///< (r x r, n x r)

    Index n() const noexcept { return U.rows(); }
    Index rank() const noexcept { return U.cols(); }

    /// Low-rank factors (Lf, Rf) with A*(0 ; t) + P_T(c) = Lf Rf^T, where t is the
    /// centering block of the residual. The remaining part is the sparse Laplacian
    /// built from the first m residual entries.
    std::pair<Mat, Mat> lowrank_factors(const SampleSet& s) const {
        const Index n = s.n();
        const Index r = rank();
        Mat lf(n, 2 * r + 2), rf(n, 2 * r + 2);
        if (r > 0) {
            const Mat f = 0.5 * U * coeffs.gamma1 + coeffs.gamma2;
            lf.leftCols(r) = f;
            lf.middleCols(r, r) = U;
            rf.leftCols(r) = U;
            rf.middleCols(r, r) = f;
        }
        const Vec t = residual.tail(n);
        lf.col(2 * r) = 0.5 * t;
        lf.col(2 * r + 1) = Vec::Constant(n, 0.5);
        rf.col(2 * r) = Vec::Ones(n);
        rf.col(2 * r + 1) = t;
        return {lf, rf};
    }
};

/// X v for X = A*(residual) + P_T(coeffs), in O(m + n r).
inline Vec implicit_iterate_matvec(const SampleSet& s, const Vec& residual, const Eigen::Ref<const Mat>& U,
                                   const TangentCoeffs& c, const Vec& v) {
    require_dim(v.size() == s.n() && residual.size() == s.m() + s.n(), "implicit_iterate_matvec: dimension mismatch");
    Vec out = apply_A_star_times(s, residual, v);
    if (U.cols() > 0) {
        const Mat f = 0.5 * U * c.gamma1 + c.gamma2;
        out += f * (U.transpose() * v) + U * (f.transpose() * v);
    }
    return out;
}

inline Vec implicit_iterate_matvec(const SampleSet& s, const CompactIterate& x, const Vec& v) {
    return implicit_iterate_matvec(s, x.residual, x.U, x.coeffs, v);
}

inline LinOp iterate_operator(const SampleSet& s, const CompactIterate& x) {
    return LinOp::symmetric(s.n(), [&s, &x](const Vec& v) { return implicit_iterate_matvec(s, x, v); });
}

inline SymMatrix to_dense(const SampleSet& s, const CompactIterate& x) {
    SymMatrix out = apply_A_star(s, x.residual);
    if (x.rank() > 0) out += embed_T(x.U, x.coeffs);
    return out;
}

namespace detail {

// ||S(ym) + Lf Rf^T||_F for the sample Laplacian S(ym) = sum_l ym_l w_l.
// The low-rank Frobenius norm goes through QR factors so that a small difference
// of two nearly equal iterates is not lost to cancellation.
inline double sparse_plus_lowrank_norm(const SampleSet& s, const Vec& ym, const Mat& lf, const Mat& rf) {
    const Index m = s.m();
    const double sparse_sq = ym.dot(apply_sample_gram(s, ym));
    double cross = 0.0;
    for (Index l = 0; l < m; ++l) {
        if (ym(l) == 0.0) continue;
        const auto& p = s.pair(l);
        cross += ym(l) * (lf.row(p.i) - lf.row(p.j)).dot(rf.row(p.i) - rf.row(p.j));
    }
    Eigen::HouseholderQR<Mat> ql(lf), qr(rf);
    const Index q = lf.cols();
    const Index kl = std::min(lf.rows(), q);
    const Mat rl = ql.matrixQR().topRows(kl).template triangularView<Eigen::Upper>();
    const Mat rr = qr.matrixQR().topRows(kl).template triangularView<Eigen::Upper>();
    const double low_sq = (rl * rr.transpose()).squaredNorm();
    return std::sqrt(std::max(0.0, sparse_sq + 2.0 * cross + low_sq));
}

} // namespace detail

inline double frobenius_norm(const SampleSet& s, const CompactIterate& x) {
    auto [lf, rf] = x.lowrank_factors(s);
    return detail::sparse_plus_lowrank_norm(s, x.residual.head(s.m()), lf, rf);
}

/// ||a - b||_F for two iterates on the same sample set.
inline double frobenius_distance(const SampleSet& s, const CompactIterate& a, const CompactIterate& b) {
    auto [la, ra] = a.lowrank_factors(s);
    auto [lb, rb] = b.lowrank_factors(s);
    Mat lf(s.n(), la.cols() + lb.cols()), rf(s.n(), ra.cols() + rb.cols());
    lf << la, -lb;
    rf << ra, rb;
    return detail::sparse_plus_lowrank_norm(s, a.residual.head(s.m()) - b.residual.head(s.m()), lf, rf);
}

} // namespace edg
