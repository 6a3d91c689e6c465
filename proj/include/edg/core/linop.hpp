#pragma once

#include <functional>
#include <memory>
#include <utility>

#include "edg/core/types.hpp"

namespace edg {

/// Type-erased linear map R^dim_in -> R^dim_out acting on dense vectors.
///
/// `apply_adjoint` may be left empty for self-adjoint operators; operator-norm
/// estimation on a non-self-adjoint map requires it.
struct LinOp {
    Index dim_in = 0;
    Index dim_out = 0;
    std::function<Vec(const Vec&)> apply;
    std::function<Vec(const Vec&)> apply_adjoint;
    bool self_adjoint = false;

    Vec operator()(const Vec& v) const {
        require_dim(v.size() == dim_in, "LinOp: input dimension mismatch");
        return apply(v);
    }

    Vec adjoint(const Vec& v) const {
        require_dim(v.size() == dim_out, "LinOp: adjoint input dimension mismatch");
        if (self_adjoint) return apply(v);
        if (!apply_adjoint) throw Error("LinOp: adjoint not available");
        return apply_adjoint(v);
    }

    static LinOp symmetric(Index n, std::function<Vec(const Vec&)> f) {
        return LinOp{n, n, std::move(f), {}, true};
    }

    static LinOp from_matrix(Mat a) {
        const bool sym = a.rows() == a.cols() && a == a.transpose();
        auto shared = std::make_shared<const Mat>(std::move(a));
        LinOp op;
        op.dim_in = shared->cols();
        op.dim_out = shared->rows();
        op.apply = [shared](const Vec& v) -> Vec { return (*shared) * v; };
        op.apply_adjoint = [shared](const Vec& v) -> Vec { return shared->transpose() * v; };
        op.self_adjoint = sym;
        return op;
    }

    static LinOp identity(Index n) {
        return symmetric(n, [](const Vec& v) { return v; });
    }
};

} // namespace edg
