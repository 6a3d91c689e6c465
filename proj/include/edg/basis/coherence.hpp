#pragma once

#include <algorithm>

#include "edg/basis/basis.hpp"

namespace edg {

struct CoherenceResult {
    double nu = 0.0;
    double primal_max = 0.0;  ///< max_a sum_b <P_T w_a, w_b>^2
    double dual_max = 0.0;    ///< max_a sum_b <P_T v_a, w_b>^2
};

/// Coherence of a rank-r Gram matrix with column space span(U0), by exhaustive
/// enumeration over the off-diagonal index pairs (O(n^4)):
///   nu = max( n/(2r) max_a sum_b <P_T w_a, w_b>^2 ,  n/(4r) max_a sum_b <P_T v_a, w_b>^2 ).
/// Diagonal basis elements are not part of either sum.
///
/// Every term is a quadratic form delta^T (P_T Z) delta with delta = e_k - e_l and
/// Z of rank <= 2, so with P = U0 U0^T each inner product is O(1) once P x is known.
/// Throws TooLarge above `max_n`.
inline CoherenceResult coherence_detail(const Eigen::Ref<const Mat>& U0, Index max_n = 64) {
    const Index n = U0.rows();
    const Index r = U0.cols();
    if (n > max_n) throw TooLarge("coherence: n exceeds the brute-force guard");
    if (r < 1 || r > n) throw DimensionMismatch("coherence: need 1 <= r <= n");

    const auto pairs = all_index_pairs(n, false);
    const Mat P = U0 * U0.transpose();

    // <P_T(x y^T + y x^T), dd^T> where P_T Z = PZ + ZP - PZP and d = e_k - e_l
    auto sym_pair_term = [](double x, double y, double px, double py) {
        // (Px)y^T + (Py)x^T + x(Py)^T + y(Px)^T - (Px)(Py)^T - (Py)(Px)^T, contracted with d twice
        return 2.0 * (px * y + py * x - px * py);
    };
    auto diff = [](const Vec& v, const IndexPair& b) { return v(b.i) - v(b.j); };

    CoherenceResult out;
    for (const auto& a : pairs) {
        // primal: w_a = d d^T = (d d^T + d d^T)/2  -> x = y = d/sqrt(2) folded into the 1/2
        Vec d = Vec::Zero(n);
        d(a.i) = 1.0;
        d(a.j) = -1.0;
        const Vec pd = P.col(a.i) - P.col(a.j);
        double s1 = 0.0;
        for (const auto& b : pairs) {
            const double t = 0.5 * sym_pair_term(diff(d, b), diff(d, b), diff(pd, b), diff(pd, b));
            s1 += t * t;
        }
        out.primal_max = std::max(out.primal_max, s1);

        // dual: v_a = -(a_i a_j^T + a_j a_i^T)/2
        const Vec ai = centered_unit(a.i, n);
        const Vec aj = centered_unit(a.j, n);
        const Vec pai = P * ai;
        const Vec paj = P * aj;
        double s2 = 0.0;
        for (const auto& b : pairs) {
            const double t = -0.5 * sym_pair_term(diff(ai, b), diff(aj, b), diff(pai, b), diff(paj, b));
            s2 += t * t;
        }
        out.dual_max = std::max(out.dual_max, s2);
    }
    const double nd = static_cast<double>(n);
    const double rd = static_cast<double>(r);
    out.nu = std::max(out.primal_max * nd / (2.0 * rd), out.dual_max * nd / (4.0 * rd));
    return out;
}

inline double coherence(const Eigen::Ref<const Mat>& U0, Index max_n = 64) {
    return coherence_detail(U0, max_n).nu;
}

} // namespace edg
