#pragma once

#include <cmath>
#include <utility>

#include "edg/core/linop.hpp"

namespace edg {

struct CgOptions {
    double tol = 1e-10;  ///< relative residual ||A x - b|| <= tol ||b||
    int max_iter = 2000;
};

template <class Vector>
struct CgResult {
    Vector x;
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

/// Plain conjugate gradients (Hestenes-Stiefel) for a self-adjoint positive definite
/// operator, generic over the vector type.
///
/// `Vector` needs `a + b`, `a - b`, `double * a`; `inner(a, b)` must be the inner
/// product in which `op` is self-adjoint. Non-convergence is reported through the
/// result flag, and the best iterate (smallest residual seen) is returned.
/// Throws NonFiniteIterate if a NaN/Inf shows up.
template <class Vector, class Op, class Inner>
CgResult<Vector> cg_solve(const Op& op, const Vector& b, Vector x0, const Inner& inner,
                          const CgOptions& opt = {}) {
    CgResult<Vector> res;
    const double bnorm = std::sqrt(inner(b, b));
    if (!std::isfinite(bnorm)) throw NonFiniteIterate("cg_solve: non-finite right-hand side");
    if (bnorm == 0.0) {
        res.x = 0.0 * b;
        res.converged = true;
        return res;
    }

    Vector x = std::move(x0);
    Vector r = b - op(x);
    double rr = inner(r, r);
    double rel = std::sqrt(rr) / bnorm;

    Vector best = x;
    double best_rel = rel;
    if (rel <= opt.tol) {
        res.x = std::move(x);
        res.rel_residual = rel;
        res.converged = true;
        return res;
    }

    Vector p = r;
    int it = 0;
    while (it < opt.max_iter) {
        Vector q = op(p);
        const double pq = inner(p, q);
        if (!std::isfinite(pq)) throw NonFiniteIterate("cg_solve: non-finite iterate");
        if (pq <= 0.0) break;  // lost definiteness numerically; keep best iterate
        const double alpha = rr / pq;
        x = x + alpha * p;
        r = r - alpha * q;
        ++it;
        const double rr_new = inner(r, r);
        if (!std::isfinite(rr_new)) throw NonFiniteIterate("cg_solve: non-finite residual");
        rel = std::sqrt(rr_new) / bnorm;
        if (rel < best_rel) {
            best_rel = rel;
            best = x;
        }
        if (rel <= opt.tol) break;
        p = r + (rr_new / rr) * p;
        rr = rr_new;
    }

    res.iterations = it;
    res.converged = best_rel <= opt.tol;
    res.rel_residual = best_rel;
    res.x = std::move(best);
    return res;
}

/// Dense-vector convenience overload using the Euclidean inner product.
inline CgResult<Vec> cg_solve(const LinOp& op, const Vec& b, const CgOptions& opt = {},
                              const Vec* x0 = nullptr) {
    require_dim(op.dim_in == op.dim_out && op.dim_in == b.size(), "cg_solve: dimension mismatch");
    if (!b.allFinite()) throw NonFiniteIterate("cg_solve: non-finite right-hand side");
    Vec start = x0 ? *x0 : Vec::Zero(b.size());
    return cg_solve(
        [&op](const Vec& v) -> Vec { return op.apply(v); }, b, std::move(start),
        [](const Vec& a, const Vec& c) { return a.dot(c); }, opt);
}

} // namespace edg
