#pragma once

#include <algorithm>
#include <cmath>

#include "edg/core/types.hpp"

namespace edg {

/// Dense real symmetric n x n matrix.
///
/// Construction from an arbitrary square matrix checks that it is symmetric up to
/// `sym_tol` (relative to its max-abs entry) and then stores the exact symmetric
/// part, so `(*this)(i, j) == (*this)(j, i)` holds bit-for-bit afterwards.
class SymMatrix {
public:
    SymMatrix() = default;

    explicit SymMatrix(Index n) : m_(Mat::Zero(n, n)) {}

    explicit SymMatrix(const Mat& m, double sym_tol = 1e-10) {
        if (m.rows() != m.cols()) throw DimensionMismatch("SymMatrix: matrix is not square");
        if (!m.allFinite()) throw NonFiniteIterate("SymMatrix: non-finite entry");
        const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > sym_tol * scale)
            throw NonSymmetric("SymMatrix: input is not symmetric");
        m_ = 0.5 * (m + m.transpose());
    }

    static SymMatrix zero(Index n) { return SymMatrix(n); }
    static SymMatrix identity(Index n) { return SymMatrix(Mat::Identity(n, n)); }

    Index n() const noexcept { return m_.rows(); }
    double operator()(Index i, Index j) const { return m_(i, j); }

    /// Sets entries (i, j) and (j, i) together.
    void set(Index i, Index j, double v) {
        m_(i, j) = v;
        m_(j, i) = v;
    }
    void add(Index i, Index j, double v) {
        m_(i, j) += v;
        if (i != j) m_(j, i) += v;
    }

    const Mat& mat() const noexcept { return m_; }

    double frobenius() const { return m_.norm(); }

    friend double inner(const SymMatrix& a, const SymMatrix& b) {
        require_dim(a.n() == b.n(), "inner: dimension mismatch");
        return a.m_.cwiseProduct(b.m_).sum();
    }

    SymMatrix& operator+=(const SymMatrix& o) {
        require_dim(n() == o.n(), "SymMatrix +=: dimension mismatch");
        m_ += o.m_;
        return *this;
    }
    SymMatrix& operator-=(const SymMatrix& o) {
        require_dim(n() == o.n(), "SymMatrix -=: dimension mismatch");
        m_ -= o.m_;
        return *this;
    }
    SymMatrix& operator*=(double a) {
        m_ *= a;
        return *this;
    }
    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
    friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
    friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }

private:
    Mat m_;
};

} // namespace edg
