#pragma once

// Hand-rolled generators and dense oracles shared by the test binaries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "edg/edg.hpp"

namespace edg::test {

inline SymMatrix random_sym(Index n, Rng& rng) {
    const Mat a = rng.normal_matrix(n, n);
    return SymMatrix(Mat(0.5 * (a + a.transpose())));
}

inline Mat random_orthonormal(Index n, Index r, Rng& rng) {
    Eigen::HouseholderQR<Mat> qr(rng.normal_matrix(n, r));
    return qr.householderQ() * Mat::Identity(n, r);
}

inline Mat random_spd(Index n, Rng& rng, double shift = 1.0) {
    const Mat a = rng.normal_matrix(n, n);
    return a * a.transpose() + shift * Mat::Identity(n, n);
}

// m distinct random pairs (or with replacement) with random nonnegative d2.
inline SampleSet random_samples(Index n, Index m, Rng& rng, bool with_replacement = false) {
    if (!with_replacement) m = std::min<Index>(m, static_cast<Index>(pair_count(n)));
    auto pairs = sample_pairs(n, m, rng.next_u64(), with_replacement);
    Vec d2(m);
    for (Index l = 0; l < m; ++l) d2(l) = rng.uniform01() * 4.0;
    return SampleSet(n, std::move(pairs), std::move(d2), with_replacement);
}

inline SampleSet full_samples(const PointCloud& p) {
    const Index n = p.n();
    std::vector<IndexPair> pairs;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) pairs.push_back({i, j});
    return observe(p, std::move(pairs));
}

inline TangentCoeffs random_coeffs(const Mat& U, Rng& rng) {
    TangentCoeffs c{rng.normal_matrix(U.cols(), U.cols()), rng.normal_matrix(U.rows(), U.cols())};
    c.reproject(U);
    return c;
}

inline double rel_diff(const Mat& a, const Mat& b) {
    const double scale = std::max(b.norm(), 1e-300);
    return (a - b).norm() / scale;
}

// Dense (m+n) x n^2 matrix of A acting on vec(X) for symmetric X.
inline Mat dense_A(const SampleSet& s) {
    const Index n = s.n();
    Mat a = Mat::Zero(s.m() + n, n * n);
    for (Index l = 0; l < s.m(); ++l) {
        const Mat w = primal_basis_element(s.pair(l), n).mat();
        a.row(l) = Eigen::Map<const Vec>(w.data(), n * n).transpose();
    }
    for (Index i = 0; i < n; ++i) {
        const Mat w = primal_basis_element(IndexPair::diagonal(i), n).mat();
        a.row(s.m() + i) = Eigen::Map<const Vec>(w.data(), n * n).transpose();
    }
    return a;
}

inline Vec vec(const SymMatrix& x) { return Eigen::Map<const Vec>(x.mat().data(), x.mat().size()); }

inline SymMatrix unvec(const Vec& v, Index n) {
    const Mat a = Eigen::Map<const Mat>(v.data(), n, n);
    return SymMatrix(Mat(0.5 * (a + a.transpose())));
}

// Orthonormal basis (columns, n^2 x n(n+1)/2) of symmetric matrices in vec form.
inline Mat sym_basis(Index n) {
    Mat b = Mat::Zero(n * n, n * (n + 1) / 2);
    Index c = 0;
    for (Index i = 0; i < n; ++i)
        for (Index j = i; j < n; ++j) {
            if (i == j) {
                b(i + n * i, c) = 1.0;
            } else {
                b(i + n * j, c) = std::sqrt(0.5);
                b(j + n * i, c) = std::sqrt(0.5);
            }
            ++c;
        }
    return b;
}

// Weight data taken from a noisy Gram matrix of `p`: top-r eigenpairs of
// gram(p) + noise, eps = eps_ratio * sigma_r.
inline SpectralState noisy_state(const PointCloud& p, Rng& rng, double noise = 1e-2, double eps_ratio = 0.3) {
    const Index n = p.n(), r = p.r();
    Mat x = gram(p).mat() + noise * random_sym(n, rng).mat();
    Eigen::SelfAdjointEigenSolver<Mat> es(x);
    SpectralState st;
    st.U = es.eigenvectors().rightCols(r).rowwise().reverse();
    st.sigma = es.eigenvalues().tail(r).reverse().cwiseAbs();
    st.sign = Vec::Ones(r);
    st.eps = Smoothing::of(eps_ratio * st.sigma(r - 1));
    return st;
}

} // namespace edg::test
