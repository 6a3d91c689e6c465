#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "edg/core/types.hpp"

namespace edg {

/// Smoothing parameter epsilon_k. The initial value is "unset" (epsilon_0 = infinity),
/// represented explicitly so that min(unset, s) == s exactly.
class Smoothing {
public:
    Smoothing() = default;
    static Smoothing unset() { return Smoothing(); }
    static Smoothing of(double v) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error("Smoothing: value must be finite and >= 0");
        Smoothing s;
        s.value_ = v;
        return s;
    }

    bool is_set() const noexcept { return value_.has_value(); }
    double value() const {
        if (!value_) throw Error("Smoothing: value requested while unset");
        return *value_;
    }
    /// value() or +infinity when unset; for logging only.
    double or_infinity() const noexcept { return value_.value_or(std::numeric_limits<double>::infinity()); }

    Smoothing min_with(double sigma) const { return of(value_ ? std::min(*value_, sigma) : sigma); }

private:
    std::optional<double> value_;
};

/// Compact weight-operator data: the r_k leading eigenpairs of the current iterate
/// (X ~ U diag(sign * sigma) U^T) and the smoothing parameter.
struct SpectralState {
    Mat U;         ///< n x r_k, orthonormal columns
    Vec sigma;     ///< |eigenvalues|, non-increasing, all > eps
    Vec sign;      ///< +1 / -1
    Smoothing eps; ///< unset for the initial (identity) weight

    Index n() const noexcept { return U.rows(); }
    Index rank() const noexcept { return U.cols(); }

    static SpectralState initial(Index n) { return {Mat(n, 0), Vec(0), Vec(0), Smoothing::unset()}; }

    /// Checks orthonormality (1e-10), ordering and sigma_i > eps.
    void validate() const {
        const Index r = rank();
        if (sigma.size() != r || sign.size() != r) throw DimensionMismatch("SpectralState: shape mismatch");
        if (r > 0) {
            const double dev = (U.transpose() * U - Mat::Identity(r, r)).cwiseAbs().maxCoeff();
            if (dev > 1e-10) throw Error("SpectralState: U is not orthonormal");
        }
        for (Index i = 0; i < r; ++i) {
            if (!(sigma(i) > 0.0)) throw Error("SpectralState: sigma must be positive");
            if (i > 0 && sigma(i) > sigma(i - 1)) throw Error("SpectralState: sigma not sorted");
            if (eps.is_set() && !(sigma(i) > eps.value())) throw Error("SpectralState: sigma_i <= eps");
            if (std::abs(sign(i)) != 1.0) throw Error("SpectralState: sign must be +-1");
        }
        if (!eps.is_set() && r > 0) throw Error("SpectralState: eigenbasis present while eps is unset");
    }
};

} // namespace edg
