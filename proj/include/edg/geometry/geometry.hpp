#pragma once

#include <algorithm>
#include <cmath>

#include "edg/core/sym_matrix.hpp"

namespace edg {

/// r x n coordinate matrix, one column per point.
class PointCloud {
public:
    PointCloud() = default;

    explicit PointCloud(Mat coords) : coords_(std::move(coords)) {
        if (coords_.cols() < 1) throw EmptyCloud("PointCloud: no points");
        if (!coords_.allFinite()) throw Error("PointCloud: non-finite coordinate");
    }

    Index r() const noexcept { return coords_.rows(); }
    Index n() const noexcept { return coords_.cols(); }
    const Mat& coords() const noexcept { return coords_; }
    auto point(Index i) const { return coords_.col(i); }

    friend bool operator==(const PointCloud& a, const PointCloud& b) {
        return a.coords_.rows() == b.coords_.rows() && a.coords_.cols() == b.coords_.cols() && a.coords_ == b.coords_;
    }

private:
    Mat coords_;
};

/// Translates the cloud so that its centroid is the origin.
inline PointCloud center(const PointCloud& p) {
    Mat c = p.coords();
    c.colwise() -= c.rowwise().mean();
    return PointCloud(std::move(c));
}

/// Gram matrix P^T P.
inline SymMatrix gram(const PointCloud& p) {
    return SymMatrix(Mat(p.coords().transpose() * p.coords()));
}

/// Squared Euclidean distance matrix, D_ij = ||p_i - p_j||^2.
inline SymMatrix edm(const PointCloud& p) {
    const Mat g = p.coords().transpose() * p.coords();
    const Vec d = g.diagonal();
    Mat out = (-2.0 * g).colwise() + d;
    out.rowwise() += d.transpose();
    out.diagonal().setZero();
    out = out.cwiseMax(0.0);
    return SymMatrix(out, 1e-8);
}

/// Points from leading eigenpairs (lambda sorted descending, U n x r):
/// P = diag(sqrt(lambda)) U^T. Eigenvalues below -neg_tol * max(|lambda|) raise NotPSD;
/// slightly negative ones are clamped to zero.
inline PointCloud points_from_eigenpairs(const Eigen::Ref<const Mat>& U, const Eigen::Ref<const Vec>& lambda,
                                         double neg_tol = 1e-8) {
    require_dim(U.cols() == lambda.size(), "points_from_eigenpairs: shape mismatch");
    const double top = lambda.size() ? lambda.cwiseAbs().maxCoeff() : 0.0;
    Vec root(lambda.size());
    for (Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) < -neg_tol * top) throw NotPSD("points_from_eigenpairs: leading eigenvalue is negative");
        root(i) = std::sqrt(std::max(0.0, lambda(i)));
    }
    return PointCloud(Mat(root.asDiagonal() * U.transpose()));
}

/// r-dimensional configuration whose Gram matrix is the best rank-r PSD part of X.
/// When r exceeds the rank of X, the trailing coordinate rows are zero.
inline PointCloud points_from_gram(const SymMatrix& X, Index r) {
    if (r < 1 || r > X.n()) throw DimensionMismatch("points_from_gram: need 1 <= r <= n");
    Eigen::SelfAdjointEigenSolver<Mat> es(X.mat());
    const Index n = X.n();
    // eigenvalues ascending; take the r largest
    Mat U = es.eigenvectors().rightCols(r).rowwise().reverse();
    Vec lam = es.eigenvalues().tail(r).reverse();
    const double top = es.eigenvalues().cwiseAbs().maxCoeff();
    for (Index i = 0; i < r; ++i) {
        if (lam(i) < -1e-8 * top) throw NotPSD("points_from_gram: top-r eigenvalue below tolerance");
        if (lam(i) <= 1e-14 * top) lam(i) = 0.0;
    }
    (void)n;
    return points_from_eigenpairs(U, lam, 1e-8);
}

/// Classical MDS: -J D J / 2 with J = I - 1 1^T / n, then points_from_gram.
inline PointCloud classical_mds(const SymMatrix& D, Index r) {
    Mat b = D.mat();
    b.rowwise() -= b.colwise().mean();
    b.colwise() -= b.rowwise().mean();
    b *= -0.5;
    return points_from_gram(SymMatrix(b, 1e-8), r);
}

/// Relative orthogonal Procrustes distance
///   min_{Q^T Q = I, t} ||Q (P0 + t 1^T) - P_rec||_F / ||P0 - mean(P0)||_F.
/// Both clouds are centered; Q = U V^T from the SVD of P_rec_c P0_c^T. Reflections
/// are allowed and no scaling is applied.
inline double procrustes_distance(const PointCloud& rec, const PointCloud& truth) {
    if (rec.r() != truth.r() || rec.n() != truth.n())
        throw DimensionMismatch("procrustes_distance: point clouds differ in shape");
    const Mat a = center(rec).coords();
    const Mat b = center(truth).coords();
    const double ref = b.norm();
    if (ref == 0.0) throw DegenerateCloud("procrustes_distance: reference cloud has zero spread");
    Eigen::JacobiSVD<Mat> svd(a * b.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat q = svd.matrixU() * svd.matrixV().transpose();
    return (q * b - a).norm() / ref;
}

inline bool success(const PointCloud& rec, const PointCloud& truth, double tol = 1e-3) {
    return procrustes_distance(rec, truth) <= tol;
}

} // namespace edg
