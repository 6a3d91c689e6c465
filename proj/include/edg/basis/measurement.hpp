#pragma once

#include <cmath>

#include "edg/basis/basis.hpp"
#include "edg/core/cg.hpp"

namespace edg {

/// Element of R^{m+n}: entries [0, m) are <w_alpha_l, X>, entries [m, m+n) are the
/// centering measurements <w_(i,i), X> = (X 1)_i.
using MeasurementVector = Vec;

namespace detail {

inline void check_measurement(const SampleSet& s, const Vec& y, const char* who) {
    if (y.size() != s.m() + s.n())
        throw DimensionMismatch(std::string(who) + ": expected a vector of length m+n");
}

} // namespace detail

/// A(X): O(m + n^2) (the row sums touch every entry).
inline MeasurementVector apply_A(const SampleSet& s, const SymMatrix& X) {
    require_dim(X.n() == s.n(), "apply_A: dimension mismatch");
    const Mat& x = X.mat();
    Vec y(s.m() + s.n());
    for (Index l = 0; l < s.m(); ++l) {
        const auto& p = s.pair(l);
        y(l) = x(p.i, p.i) + x(p.j, p.j) - 2.0 * x(p.i, p.j);
    }
    y.tail(s.n()) = x.rowwise().sum();
    return y;
}

/// Fast path of A when the row sums of X are already known: O(m + n).
inline MeasurementVector apply_A(const SampleSet& s, const SymMatrix& X, const Vec& row_sums) {
    require_dim(X.n() == s.n() && row_sums.size() == s.n(), "apply_A: dimension mismatch");
    const Mat& x = X.mat();
    Vec y(s.m() + s.n());
    for (Index l = 0; l < s.m(); ++l) {
        const auto& p = s.pair(l);
        y(l) = x(p.i, p.i) + x(p.j, p.j) - 2.0 * x(p.i, p.j);
    }
    y.tail(s.n()) = row_sums;
    return y;
}

/// Per-point sums of the sample weights y_l over the pairs incident to the point
/// (the diagonal of the sparse part of A*(y)).
inline Vec incident_sums(const SampleSet& s, const Vec& y) {
    Vec d = Vec::Zero(s.n());
    for (Index l = 0; l < s.m(); ++l) {
        const auto& p = s.pair(l);
        d(p.i) += y(l);
        d(p.j) += y(l);
    }
    return d;
}

/// A*(y) = sum_l y_l w_alpha_l + sum_i y_{m+i} w_(i,i), assembled densely.
/// The sparse part is the weighted graph Laplacian sum_l y_l (e_i - e_j)(e_i - e_j)^T;
/// the centering part is (t 1^T + 1 t^T) / 2 with t = y[m:].
inline SymMatrix apply_A_star(const SampleSet& s, const MeasurementVector& y) {
    detail::check_measurement(s, y, "apply_A_star");
    const Index n = s.n();
    Mat x = Mat::Zero(n, n);
    for (Index l = 0; l < s.m(); ++l) {
        const auto& p = s.pair(l);
        const double v = y(l);
        x(p.i, p.i) += v;
        x(p.j, p.j) += v;
        x(p.i, p.j) -= v;
        x(p.j, p.i) -= v;
    }
    const Vec t = y.tail(n);
    x.colwise() += 0.5 * t;
    x.rowwise() += 0.5 * t.transpose();
    return SymMatrix(x);
}

/// A*(y) * B for an n x q block B, without forming A*(y): O(mq + nq).
inline Mat apply_A_star_times(const SampleSet& s, const MeasurementVector& y, const Eigen::Ref<const Mat>& B) {
    detail::check_measurement(s, y, "apply_A_star_times");
    require_dim(B.rows() == s.n(), "apply_A_star_times: block has wrong row count");
    const Index n = s.n();
    Mat out = Mat::Zero(n, B.cols());
    for (Index l = 0; l < s.m(); ++l) {
        const auto& p = s.pair(l);
        const double v = y(l);
        if (v == 0.0) continue;
        const auto diff = (B.row(p.i) - B.row(p.j)).eval();
        out.row(p.i) += v * diff;
        out.row(p.j) -= v * diff;
    }
    const Vec t = y.tail(n);
    out += 0.5 * t * B.colwise().sum();
    out.rowwise() += 0.5 * (t.transpose() * B);
    return out;
}

/// U^T A*(y), r x n: the sparse pass S followed by the two centering terms.
inline Mat apply_Ut_A_star(const SampleSet& s, const MeasurementVector& y, const Eigen::Ref<const Mat>& U) {
    return apply_A_star_times(s, y, U).transpose();
}

/// Sample block of A A*: (G y)_l = inc(i) + inc(j) + 2 * (sum of y over the
/// samples of the same pair), i.e. <w_l, sum_l' y_l' w_l'>. O(m + n).
inline Vec apply_sample_gram(const SampleSet& s, const Eigen::Ref<const Vec>& ym) {
    const Index m = s.m();
    require_dim(ym.size() == m, "apply_sample_gram: expected a vector of length m");
    Vec inc = Vec::Zero(s.n());
    for (Index l = 0; l < m; ++l) {
        const auto& p = s.pair(l);
        inc(p.i) += ym(l);
        inc(p.j) += ym(l);
    }
    Vec out(m);
    if (s.num_groups() == m) {
        for (Index l = 0; l < m; ++l) {
            const auto& p = s.pair(l);
            out(l) = inc(p.i) + inc(p.j) + 2.0 * ym(l);
        }
    } else {
        Vec gsum = Vec::Zero(s.num_groups());
        for (Index l = 0; l < m; ++l) gsum(s.group(l)) += ym(l);
        for (Index l = 0; l < m; ++l) {
            const auto& p = s.pair(l);
            out(l) = inc(p.i) + inc(p.j) + 2.0 * gsum(s.group(l));
        }
    }
    return out;
}

/// A A*(y) in O(m + n).
///
/// A A* is block diagonal: the Laplacian part of A*(y) has zero row sums and the
/// centering part (t 1^T + 1 t^T)/2 has zero distance measurements. The sample
/// block is apply_sample_gram; on the centering block the row sums are
/// (n/2)(t_i + mean(t)).
inline MeasurementVector apply_AA_star(const SampleSet& s, const MeasurementVector& y) {
    detail::check_measurement(s, y, "apply_AA_star");
    const Index n = s.n();
    const Index m = s.m();
    Vec out(m + n);
    out.head(m) = apply_sample_gram(s, y.head(m));
    const auto t = y.tail(n);
    const double avg = t.sum() / static_cast<double>(n);
    out.tail(n) = 0.5 * static_cast<double>(n) * (t.array() + avg).matrix();
    return out;
}

inline LinOp AA_star_operator(const SampleSet& s) {
    return LinOp::symmetric(s.m() + s.n(), [&s](const Vec& v) { return apply_AA_star(s, v); });
}

/// Solves A A* z = b.
///
/// The sample block goes through conjugate gradients; the centering block
/// (n/2)(I + 1 1^T / n) is inverted in closed form, (2/n)(I - 1 1^T / (2n)).
/// The returned residual is measured on the full system.
inline CgResult<Vec> solve_AA_star(const SampleSet& s, const Vec& b, double tol = 1e-12, int max_iter = 5000) {
    detail::check_measurement(s, b, "solve_AA_star");
    const Index n = s.n();
    const Index m = s.m();
    if (!b.allFinite()) throw NonFiniteIterate("solve_AA_star: non-finite right-hand side");
    const double bnorm = b.norm();

    CgResult<Vec> out;
    out.x = Vec::Zero(m + n);
    if (bnorm == 0.0) {
        out.converged = true;
        return out;
    }
    // Sample-block tolerance relative to ||b|| so the full residual meets tol.
    const Vec bm = b.head(m);
    const double bm_norm = bm.norm();
    if (bm_norm > 0.0) {
        const auto block = cg_solve(
            [&s](const Vec& v) -> Vec { return apply_sample_gram(s, v); }, bm, Vec(Vec::Zero(m)),
            [](const Vec& a, const Vec& c) { return a.dot(c); },
            CgOptions{tol * bnorm / bm_norm, max_iter});
        out.x.head(m) = block.x;
        out.iterations = block.iterations;
    }
    const auto bt = b.tail(n);
    const double nd = static_cast<double>(n);
    out.x.tail(n) = (2.0 / nd) * (bt.array() - bt.sum() / (2.0 * nd)).matrix();

    out.rel_residual = (apply_AA_star(s, out.x) - b).norm() / bnorm;
    out.converged = out.rel_residual <= tol;
    return out;
}

/// A(L R^T) for a low-rank product (L, R both n x q), O(mq + nq).
inline MeasurementVector apply_A_lowrank(const SampleSet& s, const Eigen::Ref<const Mat>& Lf,
                                         const Eigen::Ref<const Mat>& Rf) {
    require_dim(Lf.rows() == s.n() && Rf.rows() == s.n() && Lf.cols() == Rf.cols(),
                "apply_A_lowrank: factor shape mismatch");
    Vec y(s.m() + s.n());
    for (Index l = 0; l < s.m(); ++l) {
        const auto& p = s.pair(l);
        y(l) = (Lf.row(p.i) - Lf.row(p.j)).dot(Rf.row(p.i) - Rf.row(p.j));
    }
    // row sums of L R^T and of R L^T averaged (the measurement sees the symmetric part)
    y.tail(s.n()) = 0.5 * (Lf * Rf.colwise().sum().transpose() + Rf * Lf.colwise().sum().transpose());
    return y;
}

} // namespace edg
