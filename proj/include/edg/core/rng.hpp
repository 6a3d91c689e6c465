#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

#include "edg/core/types.hpp"

namespace edg {

/// Seedable, platform-independent random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++ standard.
/// The std:: distributions are implementation-defined, so the conversions to
/// uniform doubles, bounded integers and normals are done here instead:
///   uniform01   = (x >> 11) * 2^-53
///   below(k)    = rejection sampling on the top bits (Lemire-free, exact)
///   normal      = Box-Muller, both outputs used
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, k). k must be > 0.
    std::uint64_t below(std::uint64_t k) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % k;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % k;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        spare_ = rad * std::sin(ang);
        has_spare_ = true;
        return rad * std::cos(ang);
    }

    Mat normal_matrix(Index rows, Index cols) {
        Mat m(rows, cols);
        // column-major fill order is part of the reproducibility contract
        for (Index j = 0; j < cols; ++j)
            for (Index i = 0; i < rows; ++i) m(i, j) = normal();
        return m;
    }

    Vec normal_vector(Index n) { return normal_matrix(n, 1).col(0); }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// splitmix64 finalizer; used to derive independent seeds from tuples.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

template <class... Rest>
std::uint64_t mix_seed(std::uint64_t first, std::uint64_t second, Rest... rest) {
    return mix_seed(mix_seed(first) ^ second, static_cast<std::uint64_t>(rest)...);
}

} // namespace edg
