#pragma once

#include <cmath>
#include <limits>

#include "edg/core/spectral_state.hpp"
#include "edg/tangent/tangent.hpp"

namespace edg {

/// Diagonal scalings of tangent coefficients induced by the weight operator.
///
/// In eigen-coordinates the weight operator multiplies entry (i, j) by
/// H_ij = 1 / (max(sigma_i, eps) max(sigma_j, eps)). On T this is the diagonal
/// operator D: Gamma1_ij -> Gamma1_ij / (sigma_i sigma_j), column j of Gamma2 by
/// 1 / (sigma_j eps); everything orthogonal to T is scaled by eps^-2.
class TangentScaling {
public:
    explicit TangentScaling(const SpectralState& st) {
        if (!st.eps.is_set()) throw Error("TangentScaling: smoothing parameter is unset");
        eps_ = st.eps.value();
        const Index r = st.rank();
        const double e2 = eps_ * eps_;
        d1_ = st.sigma * st.sigma.transpose();  // D^-1 on Gamma1
        d2_ = st.sigma * eps_;                  // D^-1 on Gamma2 columns
        c1_ = (d1_.array() - e2).matrix();      // C = D^-1 - eps^2 I
        c2_ = (d2_.array() - e2).matrix();
        for (Index j = 0; j < r; ++j) {
            for (Index i = 0; i < r; ++i)
                if (!(c1_(i, j) > 0.0) || !std::isfinite(e2 / c1_(i, j)))
                    throw SingularC("TangentScaling: sigma_i sigma_j <= eps^2");
            if (!(c2_(j) > 0.0) || !std::isfinite(e2 / c2_(j)))
                throw SingularC("TangentScaling: sigma_j eps <= eps^2");
        }
    }

    double eps() const noexcept { return eps_; }

    TangentCoeffs apply_D(const TangentCoeffs& c) const { return scale(c, d1_.cwiseInverse(), d2_.cwiseInverse()); }
    TangentCoeffs apply_D_inv(const TangentCoeffs& c) const { return scale(c, d1_, d2_); }
    TangentCoeffs apply_C(const TangentCoeffs& c) const { return scale(c, c1_, c2_); }
    /// eps^2 C^-1
    TangentCoeffs apply_eps2_C_inv(const TangentCoeffs& c) const {
        const double e2 = eps_ * eps_;
        return scale(c, (e2 * c1_.cwiseInverse().array()).matrix(), (e2 * c2_.cwiseInverse().array()).matrix());
    }

private:
    static TangentCoeffs scale(const TangentCoeffs& c, const Mat& s1, const Vec& s2) {
        TangentCoeffs out;
        out.gamma1 = c.gamma1.cwiseProduct(s1);
        out.gamma2 = c.gamma2 * s2.asDiagonal();
        return out;
    }

    double eps_ = 0.0;
    Mat d1_, c1_;
    Vec d2_, c2_;
};

/// W(Z) = U [H o (U^T Z U)] U^T in the full-space convention
///   W = P_T D P_T* + eps^-2 (I - P_T P_T*).
/// The initial state (eps unset) is the identity weight.
inline SymMatrix weight_apply(const SpectralState& st, const SymMatrix& Z) {
    require_dim(Z.n() == st.n(), "weight_apply: dimension mismatch");
    if (!st.eps.is_set()) return Z;
    const TangentScaling sc(st);
    const double inv_e2 = 1.0 / (sc.eps() * sc.eps());
    const TangentCoeffs c = project_T_star(st.U, Z);
    SymMatrix normal = Z - embed_T(st.U, c);
    return embed_T(st.U, sc.apply_D(c)) + inv_e2 * normal;
}

/// W^-1(Z) = P_T D^-1 P_T* + eps^2 (I - P_T P_T*).
inline SymMatrix weight_inverse_apply(const SpectralState& st, const SymMatrix& Z) {
    require_dim(Z.n() == st.n(), "weight_inverse_apply: dimension mismatch");
    if (!st.eps.is_set()) return Z;
    const TangentScaling sc(st);
    const double e2 = sc.eps() * sc.eps();
    const TangentCoeffs c = project_T_star(st.U, Z);
    SymMatrix normal = Z - embed_T(st.U, c);
    return embed_T(st.U, sc.apply_D_inv(c)) + e2 * normal;
}

struct ReducedApplyStats {
    int nested_iterations = 0;
    bool nested_converged = true;
};

/// One application of the reduced tangent-space system
///   M = eps^2 C^-1 + P_T* A* (A A*)^-1 A P_T,   C = D^-1 - eps^2 I,
/// with the inner (A A*)^-1 done by a nested CG solve.
inline TangentCoeffs reduced_system_apply(const SampleSet& s, const SpectralState& st, const TangentScaling& sc,
                                          const TangentCoeffs& c, double nested_tol = 1e-12,
                                          ReducedApplyStats* stats = nullptr) {
    const Vec apc = apply_A_PT(s, st.U, c);
    const auto solved = solve_AA_star(s, apc, nested_tol);
    if (stats) {
        stats->nested_iterations += solved.iterations;
        stats->nested_converged = stats->nested_converged && solved.converged;
    }
    TangentCoeffs out = sc.apply_eps2_C_inv(c);
    out += apply_PTstar_Astar(s, st.U, solved.x);
    out.reproject(st.U);
    return out;
}

inline TangentCoeffs reduced_system_apply(const SampleSet& s, const SpectralState& st, const TangentCoeffs& c) {
    return reduced_system_apply(s, st, TangentScaling(st), c);
}

} // namespace edg
