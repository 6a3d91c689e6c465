#pragma once

#include <cmath>

#include "edg/core/types.hpp"

namespace edg {

/// Smoothed log-det surrogate: sum_i f_eps(sigma_i) with
///   f_eps(s) = log s                              for s >= eps
///   f_eps(s) = log eps + (s^2 / eps^2 - 1) / 2    for s <  eps
/// which is C^1 with an eps^-2 Lipschitz derivative.
inline double smoothed_log(double sigma, double eps) {
    if (sigma >= eps) return std::log(sigma);
    return std::log(eps) + 0.5 * (sigma * sigma / (eps * eps) - 1.0);
}

inline double eval_smoothed_logdet(const Eigen::Ref<const Vec>& sigma_all, double eps) {
    if (!(eps > 0.0)) throw Error("eval_smoothed_logdet: eps must be positive");
    double acc = 0.0;
    for (Index i = 0; i < sigma_all.size(); ++i) {
        if (sigma_all(i) < 0.0) throw Error("eval_smoothed_logdet: singular values must be >= 0");
        acc += smoothed_log(sigma_all(i), eps);
    }
    return acc;
}

} // namespace edg
