#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "edg/core/types.hpp"

namespace edg {

/// Index of a primal/dual basis element. Stored 0-based; the text formats use
/// 1-based indices. Off-diagonal pairs satisfy i < j, diagonal ones i == j.
struct IndexPair {
    Index i = 0;
    Index j = 0;

    static IndexPair off_diagonal(Index a, Index b) {
        if (a == b) throw IndexOutOfRange("IndexPair: off-diagonal pair needs distinct indices");
        return a < b ? IndexPair{a, b} : IndexPair{b, a};
    }
    static IndexPair diagonal(Index a) { return IndexPair{a, a}; }

    bool is_diagonal() const noexcept { return i == j; }

    void validate(Index n) const {
        if (i < 0 || j < 0 || i >= n || j >= n || i > j)
            throw IndexOutOfRange("IndexPair (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                  ") invalid for n=" + std::to_string(n));
    }

    friend bool operator==(const IndexPair&, const IndexPair&) = default;
    friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

/// Number of off-diagonal index pairs, n(n-1)/2.
inline std::int64_t pair_count(Index n) {
    return static_cast<std::int64_t>(n) * (n - 1) / 2;
}

/// Degrees of freedom of a rank-r symmetric n x n matrix, n r - r (r - 1) / 2.
inline std::int64_t dof(Index n, Index r) {
    return static_cast<std::int64_t>(n) * r - static_cast<std::int64_t>(r) * (r - 1) / 2;
}

/// The observed index (multi)set with its squared distances.
///
/// Also caches the duplicate structure of the multiset so that sums over repeated
/// pairs are O(m); without replacement every pair is its own group.
class SampleSet {
public:
    SampleSet() = default;

    SampleSet(Index n, std::vector<IndexPair> pairs, Vec d2, bool with_replacement = false)
        : n_(n), pairs_(std::move(pairs)), d2_(std::move(d2)), with_replacement_(with_replacement) {
        if (n_ < 2) throw DimensionMismatch("SampleSet: need n >= 2");
        if (static_cast<Index>(pairs_.size()) != d2_.size())
            throw DimensionMismatch("SampleSet: pairs and d2 differ in length");
        if (!with_replacement_ && static_cast<std::int64_t>(pairs_.size()) > pair_count(n_))
            throw TooMany("SampleSet: more samples than pairs without replacement");
        for (std::size_t l = 0; l < pairs_.size(); ++l) {
            const auto& p = pairs_[l];
            p.validate(n_);
            if (p.is_diagonal()) throw IndexOutOfRange("SampleSet: diagonal pair in sample list");
            const double v = d2_(static_cast<Index>(l));
            if (!std::isfinite(v) || v < 0.0)
                throw Error("SampleSet: squared distances must be finite and >= 0");
        }
        build_groups();
        if (!with_replacement_ && num_groups_ != static_cast<Index>(pairs_.size()))
            throw Error("SampleSet: repeated pair in a without-replacement sample set");
    }

    Index n() const noexcept { return n_; }
    Index m() const noexcept { return static_cast<Index>(pairs_.size()); }
    std::int64_t L() const noexcept { return pair_count(n_); }
    bool with_replacement() const noexcept { return with_replacement_; }
    const std::vector<IndexPair>& pairs() const noexcept { return pairs_; }
    const IndexPair& pair(Index l) const { return pairs_[static_cast<std::size_t>(l)]; }
    const Vec& d2() const noexcept { return d2_; }

    /// Group id of sample l; samples of the same pair share an id.
    Index group(Index l) const { return group_[static_cast<std::size_t>(l)]; }
    Index num_groups() const noexcept { return num_groups_; }

    /// The fixed right-hand side [d2; 0] of length m + n.
    Vec measurements() const {
        Vec y = Vec::Zero(m() + n_);
        y.head(m()) = d2_;
        return y;
    }

private:
    void build_groups() {
        group_.resize(pairs_.size());
        std::unordered_map<std::int64_t, Index> ids;
        ids.reserve(pairs_.size() * 2);
        Index next = 0;
        for (std::size_t l = 0; l < pairs_.size(); ++l) {
            const std::int64_t key = static_cast<std::int64_t>(pairs_[l].i) * n_ + pairs_[l].j;
            auto [it, inserted] = ids.try_emplace(key, next);
            if (inserted) ++next;
            group_[l] = it->second;
        }
        num_groups_ = next;
    }

    Index n_ = 0;
    std::vector<IndexPair> pairs_;
    Vec d2_;
    bool with_replacement_ = false;
    std::vector<Index> group_;
    Index num_groups_ = 0;
};

} // namespace edg
