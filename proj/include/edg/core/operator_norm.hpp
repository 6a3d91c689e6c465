#pragma once

#include <cmath>
#include <cstdint>

#include "edg/core/linop.hpp"
#include "edg/core/rng.hpp"

namespace edg {

/// Largest singular value of `op` by power iteration on op* op.
///
/// Returns ||op v|| for the final unit iterate v, a lower bound that tightens
/// with the iteration count. The iteration stops early once successive
/// estimates agree to `rel_tol`.
inline double operator_norm(const LinOp& op, int iters = 300, std::uint64_t seed = 7, double rel_tol = 1e-10) {
    Rng rng(seed);
    Vec v = rng.normal_vector(op.dim_in);
    v.normalize();
    double est = 0.0;
    for (int it = 0; it < iters; ++it) {
        const Vec av = op(v);
        const double cur = av.norm();
        if (!std::isfinite(cur)) throw NonFiniteIterate("operator_norm: non-finite image");
        Vec w = op.adjoint(av);
        const double wn = w.norm();
        if (wn == 0.0) return cur;
        v = w / wn;
        if (it > 5 && std::abs(cur - est) <= rel_tol * cur) {
            est = cur;
            break;
        }
        est = cur;
    }
    return op(v).norm();
}

} // namespace edg
