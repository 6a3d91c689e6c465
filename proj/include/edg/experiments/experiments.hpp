#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "edg/basis/sampling_operator.hpp"
#include "edg/core/operator_norm.hpp"
#include "edg/dataio/generators.hpp"
#include "edg/irls/matrix_irls.hpp"

namespace edg {

struct ExperimentGrid {
    std::vector<Index> ranks{2, 3};
    std::vector<double> rhos;   ///< ascending
    int instances = 8;
    double tol_rec = 1e-3;
    InstanceSpec spec{200, 2, InstanceKind::gaussian, 1.0, 2.0, 1};  ///< n, kind, kappa and seed; r comes from ranks
    WlsMode mode = WlsMode::tangent;
    int max_outer = 400;

    void validate() const {
        if (instances < 1) throw Error("ExperimentGrid: instances must be >= 1");
        if (ranks.empty() || rhos.empty()) throw Error("ExperimentGrid: empty rank or rho list");
        if (!std::is_sorted(rhos.begin(), rhos.end())) throw Error("ExperimentGrid: rhos must be ascending");
        for (double rho : rhos)
            if (!(rho > 0.0)) throw Error("ExperimentGrid: rho must be positive");
        for (Index r : ranks)
            if (r < 1 || r >= spec.n) throw Error("ExperimentGrid: need 1 <= r < n");
    }
};

/// rho values lo, lo + step, ..., up to hi (inclusive within step / 1000).
inline std::vector<double> rho_range(double lo, double hi, double step) {
    if (!(step > 0.0) || hi < lo) throw Error("rho_range: need step > 0 and hi >= lo");
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-3));
    for (long i = 0; i <= count; ++i) out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9);
    return out;
}

struct InstanceResult {
    Index rank = 0;
    double rho = 0.0;
    int instance = 0;
    Index m = 0;
    double error = 0.0;  ///< relative Procrustes error
    int iterations = 0;
    bool converged = false;
    bool success = false;
    double wall_ms = 0.0;
};

struct CellResult {
    Index rank = 0;
    double rho = 0.0;
    double success_prob = 0.0;
    double median_err = 0.0;
    double q25_err = 0.0;
    double q75_err = 0.0;
    double median_time_ms = 0.0;
};

/// Seed of instance i in cell (rank, rho).
inline std::uint64_t instance_seed(std::uint64_t grid_seed, Index rank, double rho, int i) {
    std::uint64_t rho_bits;
    static_assert(sizeof rho_bits == sizeof rho);
    std::memcpy(&rho_bits, &rho, sizeof rho);
    return mix_seed(grid_seed, static_cast<std::uint64_t>(rank), rho_bits, static_cast<std::uint64_t>(i));
}

/// Points and samples of one synthetic instance; the two streams use separate
/// seeds derived from `seed`.
struct Instance {
    PointCloud points;
    SampleSet samples;
};

inline Instance make_instance(InstanceSpec spec, double rho, std::uint64_t seed, bool with_replacement = false) {
    spec.seed = mix_seed(seed, 1);
    PointCloud p = generate(spec);
    const Index m = oversampling_to_m(rho, spec.n, spec.r);
    SampleSet s = observe(p, sample_pairs(spec.n, m, mix_seed(seed, 2), with_replacement), with_replacement);
    return {std::move(p), std::move(s)};
}

/// Solves one instance and scores it by relative Procrustes error (negative
/// eigenvalues of a failed reconstruction are clamped to zero for scoring).
inline InstanceResult run_instance(const InstanceSpec& spec, double rho, std::uint64_t seed, WlsMode mode,
                                   int max_outer, double tol_rec) {
    const Instance inst = make_instance(spec, rho, seed);
    IrlsConfig cfg;
    cfg.r_tilde = spec.r;
    cfg.mode = mode;
    cfg.seed = seed;
    cfg.max_outer = max_outer;
    InstanceResult out;
    out.rank = spec.r;
    out.rho = rho;
    out.m = inst.samples.m();
    const IrlsResult res = matrix_irls(inst.samples, cfg);
    out.error = procrustes_distance(recovered_points(res, spec.r, true), inst.points);
    out.iterations = res.iterations();
    out.converged = res.converged;
    out.success = out.error <= tol_rec;
    out.wall_ms = res.trace.empty() ? 0.0 : res.trace.back().wall_ms;
    return out;
}

/// Worker count: EDG_THREADS if set and positive, else the hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("EDG_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs task(i) for i in [0, count) on up to `workers` threads. The first
/// exception thrown by any task is rethrown after all workers have joined.
inline void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task) {
    workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), std::max<std::size_t>(count, 1)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

/// Linear-interpolation quantile (the usual "type 7") of unsorted data.
inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw Error("quantile: empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline CellResult summarize_cell(const std::vector<InstanceResult>& runs) {
    if (runs.empty()) throw Error("summarize_cell: no runs");
    CellResult c;
    c.rank = runs.front().rank;
    c.rho = runs.front().rho;
    std::vector<double> errs, times;
    int ok = 0;
    for (const auto& r : runs) {
        errs.push_back(r.error);
        times.push_back(r.wall_ms);
        ok += r.success ? 1 : 0;
    }
    c.success_prob = static_cast<double>(ok) / static_cast<double>(runs.size());
    c.median_err = quantile(errs, 0.5);
    c.q25_err = quantile(errs, 0.25);
    c.q75_err = quantile(errs, 0.75);
    c.median_time_ms = quantile(times, 0.5);
    return c;
}

struct PhaseResult {
    std::vector<InstanceResult> runs;  ///< sorted by (rank, rho, instance)
    std::vector<CellResult> cells;     ///< sorted by (rank, rho)
};

inline PhaseResult run_phase_transition(const ExperimentGrid& grid, unsigned workers = worker_count()) {
    grid.validate();
    PhaseResult out;
    for (Index r : grid.ranks)
        for (double rho : grid.rhos)
            for (int i = 0; i < grid.instances; ++i) {
                InstanceResult ir;
                ir.rank = r;
                ir.rho = rho;
                ir.instance = i;
                out.runs.push_back(ir);
            }
    parallel_for(out.runs.size(), workers, [&](std::size_t k) {
        InstanceResult& slot = out.runs[k];
        InstanceSpec spec = grid.spec;
        spec.r = slot.rank;
        const int i = slot.instance;
        slot = run_instance(spec, slot.rho, instance_seed(grid.spec.seed, slot.rank, slot.rho, i), grid.mode,
                            grid.max_outer, grid.tol_rec);
        slot.instance = i;
    });
    std::stable_sort(out.runs.begin(), out.runs.end(), [](const InstanceResult& a, const InstanceResult& b) {
        if (a.rank != b.rank) return a.rank < b.rank;
        if (a.rho != b.rho) return a.rho < b.rho;
        return a.instance < b.instance;
    });
    for (std::size_t b = 0; b < out.runs.size(); b += static_cast<std::size_t>(grid.instances)) {
        std::vector<InstanceResult> cell(out.runs.begin() + static_cast<long>(b),
                                         out.runs.begin() + static_cast<long>(b + static_cast<std::size_t>(grid.instances)));
        out.cells.push_back(summarize_cell(cell));
    }
    return out;
}

/// Spearman rank correlation with average ranks for ties. NaN when either
/// sample is constant.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error("spearman: need two samples of equal size >= 2");
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

struct BenchRow {
    Index n = 0;
    double relative_error = 0.0;
    double wall_minutes = 0.0;
    int iterations = 0;
    bool converged = false;
};

inline BenchRow run_bench(Index n, Index r, double rho, std::uint64_t seed, WlsMode mode = WlsMode::tangent) {
    InstanceSpec spec{n, r, InstanceKind::gaussian, 1.0, 2.0, 0};
    const InstanceResult ir = run_instance(spec, rho, mix_seed(seed, static_cast<std::uint64_t>(n)), mode, 400, 1e-3);
    return {n, ir.error, ir.wall_ms / 60000.0, ir.iterations, ir.converged};
}

struct RipProbe {
    double norm_PTQPT_minus_PT = 0.0;  ///< max over trials
    double qomega_norm = 0.0;          ///< max over trials
    double bound = 0.0;                ///< 20 L sqrt(log n / m) + 1
    std::vector<double> trial_norms;
};

namespace detail {

inline SymMatrix sym_from_vec(const Vec& v, Index n) {
    const Mat a = Eigen::Map<const Mat>(v.data(), n, n);
    return SymMatrix(Mat(0.5 * (a + a.transpose())));
}

inline Vec vec_of(const SymMatrix& x) { return Eigen::Map<const Vec>(x.mat().data(), x.mat().size()); }

} // namespace detail

/// The operator P_T Q_Omega* P_T - P_T on S_n (as n^2 vectors, inputs symmetrized).
inline LinOp rip_operator(const SampleSet& s, const Mat& U0) {
    const Index n = s.n();
    LinOp op;
    op.dim_in = op.dim_out = n * n;
    op.apply = [&s, U0, n](const Vec& v) -> Vec {
        const SymMatrix pt = project_T(U0, detail::sym_from_vec(v, n));
        return detail::vec_of(project_T(U0, apply_Q_omega_adjoint(s, pt)) - pt);
    };
    op.apply_adjoint = [&s, U0, n](const Vec& v) -> Vec {
        const SymMatrix pt = project_T(U0, detail::sym_from_vec(v, n));
        return detail::vec_of(project_T(U0, apply_Q_omega(s, pt)) - pt);
    };
    return op;
}

inline LinOp q_omega_operator(const SampleSet& s) {
    const Index n = s.n();
    LinOp op;
    op.dim_in = op.dim_out = n * n;
    op.apply = [&s, n](const Vec& v) -> Vec { return detail::vec_of(apply_Q_omega(s, detail::sym_from_vec(v, n))); };
    op.apply_adjoint = [&s, n](const Vec& v) -> Vec {
        return detail::vec_of(apply_Q_omega_adjoint(s, detail::sym_from_vec(v, n)));
    };
    return op;
}

/// Measures ||P_T0 Q_Omega* P_T0 - P_T0|| and ||Q_Omega|| over `trials` independent
/// draws of m pairs (with replacement by default), T0 the tangent space at the Gram
/// matrix of a Gaussian cloud. m <= 0 picks 8 n r log n.
inline RipProbe rip_probe(Index n, Index r, Index m, int trials, std::uint64_t seed, int power_iters = 200,
                          bool with_replacement = true) {
    if (trials < 1) throw Error("rip_probe: trials must be >= 1");
    if (m <= 0) m = static_cast<Index>(std::round(8.0 * n * r * std::log(static_cast<double>(n))));
    const PointCloud p = gen_gaussian(n, r, mix_seed(seed, 0));
    Eigen::HouseholderQR<Mat> qr(p.coords().transpose());
    const Mat U0 = qr.householderQ() * Mat::Identity(n, r);
    RipProbe out;
    out.bound = 20.0 * static_cast<double>(pair_count(n)) * std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(m)) + 1.0;
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t ts = mix_seed(seed, 1, static_cast<std::uint64_t>(t));
        const SampleSet s = observe(p, sample_pairs(n, m, ts, with_replacement), with_replacement);
        const double a = operator_norm(rip_operator(s, U0), power_iters, ts, 1e-6);
        const double q = operator_norm(q_omega_operator(s), power_iters, ts, 1e-6);
        out.trial_norms.push_back(a);
        out.norm_PTQPT_minus_PT = std::max(out.norm_PTQPT_minus_PT, a);
        out.qomega_norm = std::max(out.qomega_norm, q);
    }
    return out;
}

} // namespace edg
