#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "edg/basis/sample_set.hpp"
#include "edg/core/rng.hpp"
#include "edg/geometry/geometry.hpp"

namespace edg {

enum class InstanceKind { gaussian, ill_conditioned };

struct InstanceSpec {
    Index n = 0;
    Index r = 1;
    InstanceKind kind = InstanceKind::gaussian;
    double kappa = 1.0;        ///< ill-conditioned only
    double decay_exponent = 2; ///< fixed profile; kept for record
    std::uint64_t seed = 0;

    void validate() const {
        if (!(n > r && r >= 1)) throw Error("InstanceSpec: need n > r >= 1");
        if (!(kappa >= 1.0) || !std::isfinite(kappa)) throw Error("InstanceSpec: need kappa >= 1");
    }
};

/// i.i.d. N(0, 1) coordinates, then centered.
inline PointCloud gen_gaussian(Index n, Index r, std::uint64_t seed) {
    if (n < 1 || r < 1) throw Error("gen_gaussian: need n, r >= 1");
    Rng rng(seed);
    return center(PointCloud(rng.normal_matrix(r, n)));
}

/// Gram eigenvalue profile lambda_i = 1 + (kappa - 1) ((r/i)^2 - 1) / (r^2 - 1), i = 1..r.
/// lambda_1 = kappa and lambda_r = 1; for r = 1 the single value is kappa.
inline Vec ill_conditioned_profile(Index r, double kappa) {
    Vec lam(r);
    if (r == 1) {
        lam(0) = kappa;
        return lam;
    }
    const double rd = static_cast<double>(r);
    for (Index i = 0; i < r; ++i) {
        const double q = rd / static_cast<double>(i + 1);
        lam(i) = 1.0 + (kappa - 1.0) * (q * q - 1.0) / (rd * rd - 1.0);
    }
    lam(r - 1) = 1.0;
    return lam;
}

/// P = diag(sqrt(lambda)) U^T with U a random n x r orthonormal basis orthogonal to
/// the all-ones vector, so the cloud is centered and its Gram matrix has exactly the
/// eigenvalues of ill_conditioned_profile.
inline PointCloud gen_ill_conditioned(Index n, Index r, double kappa, std::uint64_t seed) {
    if (!(n > r && r >= 1)) throw Error("gen_ill_conditioned: need n > r >= 1");
    if (!(kappa >= 1.0) || !std::isfinite(kappa)) throw Error("gen_ill_conditioned: need kappa >= 1");
    Rng rng(seed);
    Mat g = rng.normal_matrix(n, r);
    g.rowwise() -= g.colwise().mean();
    Eigen::HouseholderQR<Mat> qr(g);
    const Mat u = qr.householderQ() * Mat::Identity(n, r);
    const Vec lam = ill_conditioned_profile(r, kappa);
    return PointCloud(Mat(lam.cwiseSqrt().asDiagonal() * u.transpose()));
}

inline PointCloud generate(const InstanceSpec& spec) {
    spec.validate();
    return spec.kind == InstanceKind::gaussian ? gen_gaussian(spec.n, spec.r, spec.seed)
                                               : gen_ill_conditioned(spec.n, spec.r, spec.kappa, spec.seed);
}

/// m = round(rho * dof(n, r)), clipped to [1, L].
inline Index oversampling_to_m(double rho, Index n, Index r) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw Error("oversampling_to_m: rho must be positive");
    const double raw = std::round(rho * static_cast<double>(dof(n, r)));
    const double hi = static_cast<double>(pair_count(n));
    return static_cast<Index>(std::clamp(raw, 1.0, hi));
}

/// Off-diagonal pair with row-major linear index k over {(i, j) : i < j}.
inline IndexPair pair_from_linear(std::int64_t k, Index n) {
    const double b = 2.0 * static_cast<double>(n) - 1.0;
    auto start = [n](std::int64_t i) { return i * (2 * static_cast<std::int64_t>(n) - i - 1) / 2; };
    std::int64_t i = static_cast<std::int64_t>(std::floor((b - std::sqrt(b * b - 8.0 * static_cast<double>(k))) / 2.0));
    i = std::clamp<std::int64_t>(i, 0, n - 2);
    while (i > 0 && start(i) > k) --i;
    while (i + 1 <= n - 2 && start(i + 1) <= k) ++i;
    const std::int64_t j = k - start(i) + i + 1;
    return IndexPair{static_cast<Index>(i), static_cast<Index>(j)};
}

/// Uniform sample of m off-diagonal pairs. Without replacement a partial
/// Fisher-Yates shuffle runs over the L linear pair indices (sparse, O(m) memory).
inline std::vector<IndexPair> sample_pairs(Index n, Index m, std::uint64_t seed, bool with_replacement = false) {
    if (n < 2) throw Error("sample_pairs: need n >= 2");
    if (m < 0) throw Error("sample_pairs: m must be >= 0");
    const std::int64_t L = pair_count(n);
    if (!with_replacement && m > L) throw TooMany("sample_pairs: m exceeds n(n-1)/2 without replacement");
    Rng rng(seed);
    std::vector<IndexPair> out;
    out.reserve(static_cast<std::size_t>(m));
    if (with_replacement) {
        for (Index l = 0; l < m; ++l)
            out.push_back(pair_from_linear(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(L))), n));
        return out;
    }
    std::unordered_map<std::int64_t, std::int64_t> swapped;
    swapped.reserve(static_cast<std::size_t>(2 * m));
    auto at = [&](std::int64_t k) {
        auto it = swapped.find(k);
        return it == swapped.end() ? k : it->second;
    };
    for (std::int64_t l = 0; l < m; ++l) {
        const std::int64_t k = l + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(L - l)));
        const std::int64_t pick = at(k);
        swapped[k] = at(l);
        out.push_back(pair_from_linear(pick, n));
    }
    return out;
}

/// Squared distances of the cloud on the given pairs.
inline SampleSet observe(const PointCloud& p, std::vector<IndexPair> pairs, bool with_replacement = false) {
    Vec d2(static_cast<Index>(pairs.size()));
    for (std::size_t l = 0; l < pairs.size(); ++l) {
        pairs[l].validate(p.n());
        d2(static_cast<Index>(l)) = (p.point(pairs[l].i) - p.point(pairs[l].j)).squaredNorm();
    }
    return SampleSet(p.n(), std::move(pairs), std::move(d2), with_replacement);
}

} // namespace edg
