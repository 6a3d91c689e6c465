#pragma once

#include <cmath>

#include "edg/basis/measurement.hpp"

namespace edg {

/// Coordinates (Gamma1, Gamma2) of an element of the tangent space
///   T = { U G1 U^T + U G2^T + G2 U^T : G1 symmetric r x r, U^T G2 = 0 }
/// at a rank-r point with orthonormal eigenbasis U (n x r).
///
/// The inner product <c, c'> = <G1, G1'> + 2 <G2, G2'> equals the Frobenius
/// inner product of the embedded matrices, so embed_T is an isometry.
struct TangentCoeffs {
    Mat gamma1;  ///< r x r, symmetric
    Mat gamma2;  ///< n x r, U^T gamma2 = 0

    static TangentCoeffs zero(Index n, Index r) { return {Mat::Zero(r, r), Mat::Zero(n, r)}; }

    Index rank() const noexcept { return gamma1.rows(); }
    Index n() const noexcept { return gamma2.rows(); }
    bool empty() const noexcept { return gamma1.size() == 0; }

    TangentCoeffs& operator+=(const TangentCoeffs& o) {
        gamma1 += o.gamma1;
        gamma2 += o.gamma2;
        return *this;
    }
    TangentCoeffs& operator-=(const TangentCoeffs& o) {
        gamma1 -= o.gamma1;
        gamma2 -= o.gamma2;
        return *this;
    }
    TangentCoeffs& operator*=(double a) {
        gamma1 *= a;
        gamma2 *= a;
        return *this;
    }
    friend TangentCoeffs operator+(TangentCoeffs a, const TangentCoeffs& b) { return a += b; }
    friend TangentCoeffs operator-(TangentCoeffs a, const TangentCoeffs& b) { return a -= b; }
    friend TangentCoeffs operator*(double s, TangentCoeffs a) { return a *= s; }

    friend double inner(const TangentCoeffs& a, const TangentCoeffs& b) {
        return a.gamma1.cwiseProduct(b.gamma1).sum() + 2.0 * a.gamma2.cwiseProduct(b.gamma2).sum();
    }

    double norm() const { return std::sqrt(inner(*this, *this)); }

    /// Restores the invariants: symmetric gamma1 and gamma2 orthogonal to span(U).
    void reproject(const Eigen::Ref<const Mat>& U) {
        gamma1 = 0.5 * (gamma1 + gamma1.transpose()).eval();
        gamma2 -= U * (U.transpose() * gamma2);
    }
};

namespace detail {

inline void check_tangent(const Eigen::Ref<const Mat>& U, const TangentCoeffs& c, const char* who) {
    if (c.gamma1.rows() != U.cols() || c.gamma1.cols() != U.cols() || c.gamma2.rows() != U.rows() ||
        c.gamma2.cols() != U.cols())
        throw DimensionMismatch(std::string(who) + ": coefficient shapes do not match U");
}

// Factor F with embed_T(U, c) = F U^T + U F^T.
inline Mat tangent_factor(const Eigen::Ref<const Mat>& U, const TangentCoeffs& c) {
    return 0.5 * U * c.gamma1 + c.gamma2;
}

} // namespace detail

/// P_T*(Z) = (U^T Z U, (I - U U^T) Z U) for a dense symmetric Z. O(n^2 r).
inline TangentCoeffs project_T_star(const Eigen::Ref<const Mat>& U, const SymMatrix& Z) {
    require_dim(U.rows() == Z.n(), "project_T_star: dimension mismatch");
    const Mat zu = Z.mat() * U;
    TangentCoeffs c;
    c.gamma1 = U.transpose() * zu;
    c.gamma2 = zu - U * c.gamma1;
    c.reproject(U);
    return c;
}

/// P_T(c) = U G1 U^T + U G2^T + G2 U^T, dense.
inline SymMatrix embed_T(const Eigen::Ref<const Mat>& U, const TangentCoeffs& c) {
    detail::check_tangent(U, c, "embed_T");
    const Mat f = detail::tangent_factor(U, c);
    Mat x = f * U.transpose();
    x += x.transpose().eval();
    return SymMatrix(x);
}

/// A(P_T(c)) in O(mr + nr) without forming the n x n matrix.
///
/// With P_T(c) = F U^T + U F^T, F = U G1 / 2 + G2, the sampled entries are
///   X_ii + X_jj - 2 X_ij = 2 (F_i - F_j) . (U_i - U_j)
/// and the row sums are F (U^T 1) + U (F^T 1).
inline MeasurementVector apply_A_PT(const SampleSet& s, const Eigen::Ref<const Mat>& U, const TangentCoeffs& c) {
    require_dim(U.rows() == s.n(), "apply_A_PT: dimension mismatch");
    detail::check_tangent(U, c, "apply_A_PT");
    const Mat f = detail::tangent_factor(U, c);
    Vec y(s.m() + s.n());
    for (Index l = 0; l < s.m(); ++l) {
        const auto& p = s.pair(l);
        y(l) = 2.0 * (f.row(p.i) - f.row(p.j)).dot(U.row(p.i) - U.row(p.j));
    }
    const Vec cu = U.colwise().sum().transpose();  // c_1 = U^T 1
    const Vec cf = f.colwise().sum().transpose();
    y.tail(s.n()) = f * cu + U * cf;
    return y;
}

/// P_T*(A*(y)) in O(rm + r^2 n): G = A*(y) U from the sparse pass, then
/// Gamma1 = U^T G and Gamma2 = G - U Gamma1.
inline TangentCoeffs apply_PTstar_Astar(const SampleSet& s, const Eigen::Ref<const Mat>& U, const MeasurementVector& y) {
    require_dim(U.rows() == s.n(), "apply_PTstar_Astar: dimension mismatch");
    const Mat g = apply_A_star_times(s, y, U);
    TangentCoeffs c;
    c.gamma1 = U.transpose() * g;
    c.gamma2 = g - U * c.gamma1;
    c.reproject(U);
    return c;
}

/// P_{T_new}*(P_{T_prev}(c_prev)) in O(n r^2), for warm-starting the next solve.
inline TangentCoeffs transfer_coeffs(const Eigen::Ref<const Mat>& U_prev, const TangentCoeffs& c_prev,
                                     const Eigen::Ref<const Mat>& U_new) {
    require_dim(U_prev.rows() == U_new.rows(), "transfer_coeffs: dimension mismatch");
    if (c_prev.empty() || U_new.cols() == 0) return TangentCoeffs::zero(U_new.rows(), U_new.cols());
    detail::check_tangent(U_prev, c_prev, "transfer_coeffs");
    const Mat f = detail::tangent_factor(U_prev, c_prev);
    // X U_new with X = F U_prev^T + U_prev F^T
    const Mat xu = f * (U_prev.transpose() * U_new) + U_prev * (f.transpose() * U_new);
    TangentCoeffs c;
    c.gamma1 = U_new.transpose() * xu;
    c.gamma2 = xu - U_new * c.gamma1;
    c.reproject(U_new);
    return c;
}

/// Orthogonal projection onto T in the full space: P Z + Z P - P Z P with P = U U^T.
inline SymMatrix project_T(const Eigen::Ref<const Mat>& U, const SymMatrix& Z) {
    return embed_T(U, project_T_star(U, Z));
}

} // namespace edg
