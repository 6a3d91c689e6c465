#pragma once

#include <algorithm>

#include "edg/irls/compact_iterate.hpp"
#include "edg/irls/weight.hpp"

namespace edg {

/// Output of one weighted least squares step:
/// X^{k+1} = A*(residual) + P_T(coeffs).
struct WlsStep {
    Vec residual;
    TangentCoeffs coeffs;
    int inner_iterations = 0;   ///< outer CG iterations on the reduced / range system
    int nested_iterations = 0;  ///< total CG iterations spent inside (A A*)^-1
    double inner_rel_residual = 0.0;
    bool converged = true;
};

struct WlsOptions {
    double tol_inner = 1e-10;
    int max_inner = 2000;
    double nested_tol = 1e-12;
    double roundoff_floor = 1e-15;  ///< tangent mode: CG stops once ||residual|| <= roundoff_floor * ||h||
};

/// Step with the identity weight: X = A*(A A*)^-1 y, the minimum-Frobenius-norm
/// matrix satisfying the constraints.
inline WlsStep wls_step_identity(const SampleSet& s, const Vec& y, const WlsOptions& opt = {}) {
    const auto solved = solve_AA_star(s, y, opt.nested_tol);
    WlsStep out;
    out.residual = solved.x;
    out.coeffs = TangentCoeffs::zero(s.n(), 0);
    out.nested_iterations = solved.iterations;
    out.inner_rel_residual = solved.rel_residual;
    out.converged = solved.converged;
    return out;
}

/// Range-space step: solve (A W^-1 A*) z = y by CG, where
///   A W^-1 A* = A P_T C P_T* A* + eps^2 A A*,
/// then coeffs = C P_T* A*(z) and residual = eps^2 z.
inline WlsStep wls_step_range(const SampleSet& s, const SpectralState& st, const Vec& y, const WlsOptions& opt = {}) {
    if (st.rank() == 0 && !st.eps.is_set()) return wls_step_identity(s, y, opt);
    require_dim(y.size() == s.m() + s.n() && st.n() == s.n(), "wls_step_range: dimension mismatch");
    const TangentScaling sc(st);
    const double e2 = sc.eps() * sc.eps();

    auto op = [&](const Vec& z) -> Vec {
        Vec out = e2 * apply_AA_star(s, z);
        if (st.rank() > 0) out += apply_A_PT(s, st.U, sc.apply_C(apply_PTstar_Astar(s, st.U, z)));
        return out;
    };
    const auto sol = cg_solve(op, y, Vec(Vec::Zero(y.size())), [](const Vec& a, const Vec& b) { return a.dot(b); },
                              CgOptions{opt.tol_inner, opt.max_inner});

    WlsStep out;
    out.coeffs = st.rank() > 0 ? sc.apply_C(apply_PTstar_Astar(s, st.U, sol.x)) : TangentCoeffs::zero(s.n(), 0);
    if (st.rank() > 0) out.coeffs.reproject(st.U);
    out.residual = e2 * sol.x;
    out.inner_iterations = sol.iterations;
    out.inner_rel_residual = sol.rel_residual;
    out.converged = sol.converged;
    return out;
}

/// Tangent-space step: with z0 = (A A*)^-1 y and h = P_T* A*(z0), solve
///   M gamma = h,   M = eps^2 C^-1 + P_T* A* (A A*)^-1 A P_T
/// in correction form: gamma = warm + d with M d = h - M warm, where CG runs on d
/// from zero and `tol_inner` is relative to the warm-start residual ||h - M warm||.
/// Then residual = (A A*)^-1 (y - A P_T gamma).
/// `z0` may be passed in when it is reused across iterations.
inline WlsStep wls_step_tangent(const SampleSet& s, const SpectralState& st, const Vec& y, const TangentCoeffs& warm,
                                const WlsOptions& opt = {}, const Vec* z0 = nullptr) {
    // Without tangent directions W is a multiple of the identity.
    if (st.rank() == 0) return wls_step_identity(s, y, opt);
    require_dim(y.size() == s.m() + s.n() && st.n() == s.n(), "wls_step_tangent: dimension mismatch");
    const TangentScaling sc(st);

    WlsStep out;
    Vec z0_local;
    if (!z0) {
        const auto solved = solve_AA_star(s, y, opt.nested_tol);
        out.nested_iterations += solved.iterations;
        z0_local = solved.x;
        z0 = &z0_local;
    }
    const TangentCoeffs h = apply_PTstar_Astar(s, st.U, *z0);

    ReducedApplyStats stats;
    auto op = [&](const TangentCoeffs& c) { return reduced_system_apply(s, st, sc, c, opt.nested_tol, &stats); };
    TangentCoeffs start = warm.rank() == st.rank() && warm.n() == st.n() ? warm : TangentCoeffs::zero(st.n(), st.rank());
    start.reproject(st.U);
    TangentCoeffs h0 = h;
    if (start.norm() > 0.0) h0 = h - op(start);
    // Below roundoff of the full right-hand side the correction cannot improve.
    const double h0_norm = h0.norm();
    const double tol = h0_norm > 0.0 ? std::max(opt.tol_inner, opt.roundoff_floor * h.norm() / h0_norm) : opt.tol_inner;
    auto sol = cg_solve(op, h0, TangentCoeffs::zero(st.n(), st.rank()),
                        [](const TangentCoeffs& a, const TangentCoeffs& b) { return inner(a, b); },
                        CgOptions{tol, opt.max_inner});
    TangentCoeffs gamma = start + sol.x;
    gamma.reproject(st.U);

    const auto res = solve_AA_star(s, y - apply_A_PT(s, st.U, gamma), opt.nested_tol);
    out.residual = res.x;
    out.coeffs = std::move(gamma);
    out.inner_iterations = sol.iterations;
    out.nested_iterations += stats.nested_iterations + res.iterations;
    out.inner_rel_residual = sol.rel_residual;
    out.converged = sol.converged;
    return out;
}

} // namespace edg
