// Recover a random planar configuration from a few of its pairwise distances.

#include <cstdio>

#include "edg/edg.hpp"

int main() {
    const edg::Index n = 200, r = 2;
    const edg::PointCloud truth = edg::gen_gaussian(n, r, 42);

    // three times the degrees of freedom of a rank-2 Gram matrix
    const edg::Index m = edg::oversampling_to_m(3.0, n, r);
    const edg::SampleSet samples = edg::observe(truth, edg::sample_pairs(n, m, 7));
    std::printf("observed %lld of %lld distances\n", static_cast<long long>(samples.m()),
                static_cast<long long>(samples.L()));

    edg::IrlsConfig cfg;
    cfg.r_tilde = r;
    const edg::IrlsResult res = edg::matrix_irls(samples, cfg, truth);

    for (const auto& row : res.trace)
        std::printf("k=%2d  eps=%.3e  procrustes=%.3e\n", row.k, row.eps, row.procrustes_err);

    const edg::PointCloud rec = edg::recovered_points(res, r);
    std::printf("%s after %d iterations, relative error %.3e\n", res.stop_reason.c_str(), res.iterations(),
                edg::procrustes_distance(rec, truth));
    return res.converged ? 0 : 2;
}
