#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "edg/core/operator_norm.hpp"
#include "edg/core/rng.hpp"
#include "edg/core/truncated_eig.hpp"
#include "edg/geometry/geometry.hpp"
#include "edg/irls/wls.hpp"

namespace edg {

enum class WlsMode { tangent, range };

inline const char* to_string(WlsMode m) { return m == WlsMode::tangent ? "tangent" : "range"; }

inline WlsMode parse_mode(const std::string& s) {
    if (s == "tangent") return WlsMode::tangent;
    if (s == "range") return WlsMode::range;
    throw Error("unknown mode '" + s + "' (expected tangent or range)");
}

struct IrlsConfig {
    Index r_tilde = 1;         ///< rank estimate
    int max_outer = 400;       ///< outer IRLS iterations
    int max_inner = 2000;      ///< CG cap for the reduced / range system
    double tol_inner = 1e-10;  ///< CG relative residual
    double outer_tol = 1e-12;  ///< stop when ||X_k - X_{k-1}||_F / ||X_{k-1}||_F < outer_tol
    WlsMode mode = WlsMode::tangent;
    std::uint64_t seed = 1;

    Index rank_cap_extra = 5;       ///< r_k <= r_tilde + rank_cap_extra
    double eps_floor_ratio = 1e-14; ///< stop when eps_k / sigma_1 < eps_floor_ratio
    double nested_tol = 1e-12;      ///< (A A*)^-1 solves
    double eig_tol = 1e-10;         ///< eigensolver residual, relative to |lambda_1|
    bool track_spectral_error = false;  ///< with ground truth: ||X_k - X0||_2 / ||X0||_2 per iteration

    void validate() const {
        if (r_tilde < 1) throw Error("IrlsConfig: r_tilde must be >= 1");
        if (!(tol_inner > 0.0) || !(outer_tol > 0.0) || !(nested_tol > 0.0) || !(eig_tol > 0.0))
            throw Error("IrlsConfig: tolerances must be positive");
        if (max_outer < 1 || max_inner < 1) throw Error("IrlsConfig: iteration caps must be >= 1");
    }
};

struct TraceRow {
    int k = 0;
    double eps = 0.0;
    double sigma_r1 = 0.0;
    double rel_change = std::numeric_limits<double>::quiet_NaN();
    int inner_iters = 0;
    int nested_iters = 0;
    double procrustes_err = std::numeric_limits<double>::quiet_NaN();
    double spectral_err = std::numeric_limits<double>::quiet_NaN();
    double wall_ms = 0.0;   ///< cumulative since the start of the run
    Index rank = 0;         ///< r_k used for the next weight operator
    double eig_residual = 0.0;
    double feasibility = 0.0;  ///< ||A(X_k) - y|| / ||y||
};

struct IrlsResult {
    CompactIterate gram;
    SpectralState state;      ///< weight data computed from the final iterate
    Mat top_vectors;          ///< leading eigenvectors of the final iterate (by |lambda|)
    Vec top_values;           ///< matching signed eigenvalues
    std::vector<TraceRow> trace;
    bool converged = false;
    bool underdetermined = false;
    std::string stop_reason;

    int iterations() const noexcept { return static_cast<int>(trace.size()); }
};

namespace detail {

inline PointCloud clamped_points(const Mat& U, const Vec& lambda, Index r) {
    Vec root(r);
    for (Index i = 0; i < r; ++i) root(i) = std::sqrt(std::max(0.0, lambda(i)));
    return PointCloud(Mat(root.asDiagonal() * U.leftCols(r).transpose()));
}

} // namespace detail

/// Points of dimension r from the leading eigenpairs of the final iterate.
/// Negative leading eigenvalues raise NotPSD unless `clamp_negative` is set, in
/// which case they contribute zero coordinates (useful for scoring failed runs).
inline PointCloud recovered_points(const IrlsResult& res, Index r, bool clamp_negative = false) {
    if (r < 1 || r > res.top_vectors.cols()) throw DimensionMismatch("recovered_points: r exceeds stored eigenpairs");
    if (clamp_negative) return detail::clamped_points(res.top_vectors, res.top_values, r);
    return points_from_eigenpairs(res.top_vectors.leftCols(r), res.top_values.head(r));
}

namespace detail {

inline double spectral_error(const SampleSet& s, const CompactIterate& x, const PointCloud& truth,
                             std::uint64_t seed) {
    const Mat& p = truth.coords();
    const double ref = Eigen::SelfAdjointEigenSolver<Mat>(p * p.transpose()).eigenvalues().cwiseAbs().maxCoeff();
    LinOp diff = LinOp::symmetric(s.n(), [&](const Vec& v) -> Vec {
        return implicit_iterate_matvec(s, x, v) - p.transpose() * (p * v);
    });
    return operator_norm(diff, 500, seed, 1e-6) / ref;
}

} // namespace detail

/// MatrixIRLS for Euclidean distance geometry.
///
/// Each outer iteration solves the weighted least squares problem
///   X_k = argmin <X, W_{k-1} X>  s.t.  A(X) = [d2; 0]
/// (first with W_0 = Id), updates eps_k = min(eps_{k-1}, sigma_{r~+1}(X_k)), and
/// rebuilds the weight operator from the r_k = #{sigma_i > eps_k} leading
/// eigenpairs (capped at r~ + rank_cap_extra). Iterates stay in compact form
/// A*(residual) + P_T(coeffs) throughout.
///
/// Stops when the relative iterate change drops below outer_tol, when
/// eps_k / sigma_1 < eps_floor_ratio, or after max_outer iterations (converged = false).
inline IrlsResult matrix_irls(const SampleSet& s, const IrlsConfig& cfg,
                              const std::optional<PointCloud>& ground_truth = std::nullopt) {
    cfg.validate();
    const Index n = s.n();
    if (ground_truth && ground_truth->n() != n) throw DimensionMismatch("matrix_irls: ground truth has wrong size");
    using clock = std::chrono::steady_clock;
    const auto t_start = clock::now();

    const Vec y = s.measurements();
    const double ynorm = std::max(y.norm(), std::numeric_limits<double>::min());
    WlsOptions wopt{cfg.tol_inner, cfg.max_inner, cfg.nested_tol};

    IrlsResult res;
    res.underdetermined = s.m() < dof(n, cfg.r_tilde);

    SpectralState state = SpectralState::initial(n);
    TangentCoeffs warm;
    std::optional<CompactIterate> prev;
    double prev_norm = 0.0;

    Vec z0;
    if (cfg.mode == WlsMode::tangent) z0 = solve_AA_star(s, y, cfg.nested_tol).x;

    const Index k_base = std::min<Index>(n, cfg.r_tilde + 1);
    const Index k_cap = std::min<Index>(n, cfg.r_tilde + cfg.rank_cap_extra);

    for (int k = 1; k <= cfg.max_outer; ++k) {
        WlsStep step = cfg.mode == WlsMode::tangent ? wls_step_tangent(s, state, y, warm, wopt, &z0)
                                                    : wls_step_range(s, state, y, wopt);
        CompactIterate x{std::move(step.residual), state.U, std::move(step.coeffs)};
        if (!x.residual.allFinite() || !x.coeffs.gamma1.allFinite() || !x.coeffs.gamma2.allFinite())
            throw NonFiniteIterate("matrix_irls: non-finite iterate at k=" + std::to_string(k));

        // spectral information of the new iterate
        EigOptions eo;
        eo.tol = cfg.eig_tol;
        eo.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(k));
        // only the magnitude of sigma_{r~+1} enters the eps update
        eo.strict_pairs = cfg.r_tilde;
        const LinOp xop = iterate_operator(s, x);
        EigResult eig = truncated_eig(xop, k_base, eo);
        const double sigma_r1 = k_base == cfg.r_tilde + 1 ? std::abs(eig.lambda(k_base - 1)) : 0.0;
        const Smoothing eps = state.eps.min_with(sigma_r1);
        Index count = 0;
        while (count < eig.lambda.size() && std::abs(eig.lambda(count)) > eps.value()) ++count;
        if (count == eig.lambda.size() && eig.lambda.size() < k_cap) {
            eig = truncated_eig(xop, k_cap, eo);
            count = 0;
            while (count < eig.lambda.size() && std::abs(eig.lambda(count)) > eps.value()) ++count;
        }
        const Index rk = std::min(count, k_cap);

        SpectralState next;
        next.U = eig.U.leftCols(rk);
        next.sigma = eig.lambda.head(rk).cwiseAbs();
        next.sign = eig.lambda.head(rk).unaryExpr([](double v) { return v < 0.0 ? -1.0 : 1.0; });
        next.eps = eps;

        TraceRow row;
        row.k = k;
        row.eps = eps.value();
        row.sigma_r1 = sigma_r1;
        row.inner_iters = step.inner_iterations;
        row.nested_iters = step.nested_iterations;
        row.rank = rk;
        row.eig_residual = eig.residuals.size() ? eig.residuals.maxCoeff() : 0.0;
        {
            Vec ax = apply_AA_star(s, x.residual);
            if (x.rank() > 0) ax += apply_A_PT(s, x.U, x.coeffs);
            row.feasibility = (ax - y).norm() / ynorm;
        }
        const double cur_norm = frobenius_norm(s, x);
        if (prev) row.rel_change = frobenius_distance(s, x, *prev) / std::max(prev_norm, std::numeric_limits<double>::min());
        if (ground_truth) {
            const Index r = std::min<Index>(ground_truth->r(), eig.lambda.size());
            if (r == ground_truth->r()) {
                row.procrustes_err = procrustes_distance(detail::clamped_points(eig.U, eig.lambda, r), *ground_truth);
            }
            if (cfg.track_spectral_error) row.spectral_err = detail::spectral_error(s, x, *ground_truth, eo.seed);
        }
        row.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t_start).count();
        res.trace.push_back(row);

        const double sigma1 = std::abs(eig.lambda(0));
        const bool small_change = prev && row.rel_change < cfg.outer_tol;
        const bool eps_floor = sigma1 == 0.0 || eps.value() / sigma1 < cfg.eps_floor_ratio;

        if (cfg.mode == WlsMode::tangent) warm = transfer_coeffs(x.U, x.coeffs, next.U);

        res.gram = x;
        res.top_vectors = eig.U;
        res.top_values = eig.lambda;
        res.state = next;
        if (small_change || eps_floor) {
            res.converged = true;
            res.stop_reason = small_change ? "relative change below outer_tol" : "eps_k / sigma_1 below floor";
            break;
        }
        prev = std::move(x);
        prev_norm = cur_norm;
        state = std::move(next);
    }
    if (!res.converged) res.stop_reason = "max_outer reached";
    return res;
}

/// Trace CSV: k,eps,sigma_r1,rel_change,inner_iters,procrustes_err,wall_ms
inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
    const auto old = os.precision(17);
    os << "k,eps,sigma_r1,rel_change,inner_iters,procrustes_err,wall_ms\n";
    for (const auto& t : trace) {
        os << t.k << ',' << t.eps << ',' << t.sigma_r1 << ',' << t.rel_change << ',' << t.inner_iters << ','
           << t.procrustes_err << ',' << t.wall_ms << '\n';
    }
    os.precision(old);
}

} // namespace edg
