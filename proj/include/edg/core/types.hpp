#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "edg/core/errors.hpp"

namespace edg {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline bool all_finite(const Eigen::Ref<const Mat>& m) {
    return m.allFinite();
}

inline void require_dim(bool ok, const std::string& what) {
    if (!ok) throw DimensionMismatch(what);
}

} // namespace edg
