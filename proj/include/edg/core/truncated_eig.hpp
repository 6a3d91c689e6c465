#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "edg/core/linop.hpp"
#include "edg/core/rng.hpp"

namespace edg {

struct EigOptions {
    double tol = 1e-10;         ///< per-pair residual bound, relative to |lambda_1|
    Index oversample = 2;       ///< block size is k + oversample
    Index max_basis = 0;        ///< Krylov basis cap before a restart; 0 picks a default
    int max_restarts = 30;
    std::uint64_t seed = 0x5eed;
    /// Pairs [strict_pairs, k) only need res <= max(tol * |lambda_1|, trailing_rel_tol * |lambda_i|),
    /// i.e. their eigenvalue to a relative accuracy. Negative means all k pairs are strict.
    Index strict_pairs = -1;
    double trailing_rel_tol = 0.1;
};

struct EigResult {
    Mat U;           ///< n x k, orthonormal columns
    Vec lambda;      ///< signed eigenvalues, sorted by |lambda| descending
    Vec residuals;   ///< ||A u_i - lambda_i u_i||
    int matvecs = 0;
};

namespace detail {

// Orthonormalizes the columns of `w` against `basis` and against each other
// (classical Gram-Schmidt, applied twice). Columns that collapse are replaced by
// random directions. Returns the number of columns kept; fewer than w.cols() only
// when the basis already spans the whole space.
inline Index orthonormalize_block(const Mat& basis, Mat& w, Rng& rng) {
    const Index n = w.rows();
    Index kept = 0;
    for (Index c = 0; c < w.cols(); ++c) {
        if (basis.cols() + kept >= n) break;
        Vec v = w.col(c);
        for (int attempt = 0; attempt < 4; ++attempt) {
            const double before = v.norm();
            for (int pass = 0; pass < 2; ++pass) {
                if (basis.cols() > 0) v -= basis * (basis.transpose() * v);
                if (kept > 0) v -= w.leftCols(kept) * (w.leftCols(kept).transpose() * v);
            }
            const double after = v.norm();
            if (after > 1e-10 * before && after > 0.0) {
                w.col(kept) = v / after;
                ++kept;
                break;
            }
            v = rng.normal_vector(n);
        }
    }
    w.conservativeResize(Eigen::NoChange, kept);
    return kept;
}

} // namespace detail

/// Largest-magnitude eigenpairs of a self-adjoint operator.
///
/// Block Krylov (block Lanczos) with full reorthogonalization and Rayleigh-Ritz
/// extraction from a Gaussian start block of size k + oversample. When the basis
/// reaches `max_basis` the iteration restarts from the current best Ritz block.
/// Ties in |lambda| keep the order in which the Ritz values were produced.
/// Throws ConvergenceFailure if some pair's residual exceeds tol * |lambda_1| after
/// all restarts.
inline EigResult truncated_eig(const LinOp& op, Index k, const EigOptions& opt = {}) {
    const Index n = op.dim_in;
    require_dim(op.dim_out == n, "truncated_eig: operator must be square");
    if (k < 1 || k > n) throw DimensionMismatch("truncated_eig: need 1 <= k <= n");

    Rng rng(opt.seed);
    const Index block = std::min(n, k + opt.oversample);
    const Index cap = opt.max_basis > 0 ? std::min(n, std::max(opt.max_basis, 2 * block))
                                        : std::min(n, std::max<Index>(12 * block, 80));

    EigResult out;
    Mat start = rng.normal_matrix(n, block);

    for (int restart = 0; restart <= opt.max_restarts; ++restart) {
        Mat V(n, 0), AV(n, 0);
        Mat q = start;
        detail::orthonormalize_block(V, q, rng);

        while (true) {
            Mat aq(n, q.cols());
            for (Index c = 0; c < q.cols(); ++c) aq.col(c) = op.apply(q.col(c));
            out.matvecs += static_cast<int>(q.cols());
            if (!aq.allFinite()) throw NonFiniteIterate("truncated_eig: operator produced non-finite values");

            const Index d0 = V.cols();
            V.conservativeResize(Eigen::NoChange, d0 + q.cols());
            AV.conservativeResize(Eigen::NoChange, d0 + q.cols());
            V.rightCols(q.cols()) = q;
            AV.rightCols(q.cols()) = aq;

            Mat H = V.transpose() * AV;
            H = 0.5 * (H + H.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Mat> es(H);
            const Vec& theta = es.eigenvalues();

            std::vector<Index> order(static_cast<std::size_t>(theta.size()));
            std::iota(order.begin(), order.end(), Index{0});
            std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
                return std::abs(theta(a)) > std::abs(theta(b));
            });

            const Index kk = std::min<Index>(k, V.cols());
            const Index keep = std::min<Index>(block, V.cols());
            Mat Y(V.cols(), keep);
            Vec th(keep);
            for (Index c = 0; c < keep; ++c) {
                Y.col(c) = es.eigenvectors().col(order[static_cast<std::size_t>(c)]);
                th(c) = theta(order[static_cast<std::size_t>(c)]);
            }
            Mat U = V * Y;
            Mat AU = AV * Y;
            Vec res(kk);
            for (Index c = 0; c < kk; ++c) res(c) = (AU.col(c) - th(c) * U.col(c)).norm();

            const double scale = std::abs(th(0));
            const Index strict = opt.strict_pairs < 0 ? k : std::min(opt.strict_pairs, k);
            auto meets = [&](double floor) {
                for (Index c = 0; c < kk; ++c) {
                    double bound = std::max(opt.tol, floor) * scale;
                    if (c >= strict) bound = std::max(bound, opt.trailing_rel_tol * std::abs(th(c)));
                    if (res(c) > bound) return false;
                }
                return true;
            };
            const bool full_space = V.cols() >= n;
            const bool done = kk == k && meets(0.0);
            if (done || (full_space && kk == k)) {
                out.U = U.leftCols(k);
                out.lambda = th.head(k);
                out.residuals = res;
                if (!done && !meets(1e-12))
                    throw ConvergenceFailure("truncated_eig: residual tolerance not met on full space");
                return out;
            }

            if (V.cols() >= cap) {
                start = U;  // restart from the best Ritz block
                break;
            }
            q = aq.leftCols(std::min<Index>(aq.cols(), cap - V.cols()));
            if (detail::orthonormalize_block(V, q, rng) == 0) {
                start = U;
                break;
            }
        }
    }
    throw ConvergenceFailure("truncated_eig: residual tolerance not met after restarts");
}

} // namespace edg
