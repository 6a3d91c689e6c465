#include <gtest/gtest.h>

#include "support.hpp"

using namespace edg;
using namespace edg::test;

namespace {

SymMatrix naive_project(const Mat& u, const SymMatrix& z) {
    const Mat p = u * u.transpose();
    const Mat q = Mat::Identity(u.rows(), u.rows()) - p;
    return SymMatrix(Mat(z.mat() - q * z.mat() * q), 1e-8);
}

} // namespace

TEST(TangentCoeffs, ReprojectRestoresInvariants) {
    Rng rng(1);
    const Mat u = random_orthonormal(10, 3, rng);
    TangentCoeffs c{rng.normal_matrix(3, 3), rng.normal_matrix(10, 3)};
    c.reproject(u);
    EXPECT_LE((c.gamma1 - c.gamma1.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((u.transpose() * c.gamma2).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(TangentCoeffs, InnerProductMatchesEmbedding) {
    Rng rng(2);
    const Mat u = random_orthonormal(12, 2, rng);
    for (int t = 0; t < 20; ++t) {
        const TangentCoeffs a = random_coeffs(u, rng), b = random_coeffs(u, rng);
        EXPECT_NEAR(inner(a, b), inner(embed_T(u, a), embed_T(u, b)), 1e-10 * a.norm() * b.norm());
    }
}

TEST(ProjectTStar, InSpanAndNormalSpace) {
    Rng rng(3);
    const Index n = 9, r = 3;
    const Mat full = random_orthonormal(n, n, rng);
    const Mat u = full.leftCols(r), uperp = full.rightCols(n - r);
    const SymMatrix m = random_sym(r, rng);
    const auto in_span = project_T_star(u, SymMatrix(Mat(u * m.mat() * u.transpose()), 1e-8));
    EXPECT_LE((in_span.gamma1 - m.mat()).norm(), 1e-12);
    EXPECT_LE(in_span.gamma2.norm(), 1e-12);
    const SymMatrix nn = random_sym(n - r, rng);
    const auto normal = project_T_star(u, SymMatrix(Mat(uperp * nn.mat() * uperp.transpose()), 1e-8));
    EXPECT_LE(normal.gamma1.norm(), 1e-12);
    EXPECT_LE(normal.gamma2.norm(), 1e-12);
    EXPECT_THROW(project_T_star(u, SymMatrix::zero(4)), DimensionMismatch);
}

TEST(ProjectTStar, EmbedThenProjectIsIdentity) {
    Rng rng(4);
    for (int t = 0; t < 10; ++t) {
        const Mat u = random_orthonormal(15, 1 + t % 4, rng);
        const TangentCoeffs c = random_coeffs(u, rng);
        const TangentCoeffs back = project_T_star(u, embed_T(u, c));
        EXPECT_LE((back - c).norm(), 1e-12 * std::max(1.0, c.norm()));
    }
}

TEST(EmbedT, ExamplesAndAdjointness) {
    Rng rng(5);
    const Mat u = random_orthonormal(8, 2, rng);
    EXPECT_LE(embed_T(u, TangentCoeffs::zero(8, 2)).frobenius(), 0.0);
    TangentCoeffs id{Mat::Identity(2, 2), Mat::Zero(8, 2)};
    EXPECT_LE((embed_T(u, id).mat() - u * u.transpose()).norm(), 1e-14);
    for (int t = 0; t < 20; ++t) {
        const TangentCoeffs c = random_coeffs(u, rng);
        const SymMatrix z = random_sym(8, rng);
        EXPECT_NEAR(inner(embed_T(u, c), z), inner(c, project_T_star(u, z)), 1e-10 * c.norm() * z.frobenius());
    }
    EXPECT_THROW(embed_T(u, TangentCoeffs::zero(7, 2)), DimensionMismatch);
}

TEST(ProjectT, OrthogonalProjectionProperties) {
    Rng rng(6);
    const Mat u = random_orthonormal(11, 3, rng);
    for (int t = 0; t < 20; ++t) {
        const SymMatrix a = random_sym(11, rng), b = random_sym(11, rng);
        const SymMatrix pa = project_T(u, a);
        EXPECT_LE((project_T(u, pa) - pa).frobenius(), 1e-10 * a.frobenius());
        EXPECT_NEAR(inner(pa, b), inner(a, project_T(u, b)), 1e-10 * a.frobenius() * b.frobenius());
        EXPECT_LE((pa - naive_project(u, a)).frobenius(), 1e-12 * a.frobenius());
    }
}

TEST(TangentSpace, DimensionCount) {
    const Index n = 8, r = 2;
    Rng rng(7);
    const Mat u = random_orthonormal(n, r, rng);
    const Mat full = random_orthonormal(n, n, rng);
    Mat uperp = (Mat::Identity(n, n) - u * u.transpose()) * full;
    Eigen::JacobiSVD<Mat> sv(uperp, Eigen::ComputeThinU);
    uperp = sv.matrixU().leftCols(n - r);
    std::vector<Vec> images;
    for (Index i = 0; i < r; ++i)
        for (Index j = i; j < r; ++j) {
            TangentCoeffs c = TangentCoeffs::zero(n, r);
            c.gamma1(i, j) = c.gamma1(j, i) = 1.0;
            images.push_back(vec(embed_T(u, c)));
        }
    for (Index a = 0; a < n - r; ++a)
        for (Index j = 0; j < r; ++j) {
            TangentCoeffs c = TangentCoeffs::zero(n, r);
            c.gamma2.col(j) = uperp.col(a);
            images.push_back(vec(embed_T(u, c)));
        }
    const Index expected = r * (r + 1) / 2 + (n - r) * r;
    ASSERT_EQ(static_cast<Index>(images.size()), expected);
    Mat m(n * n, expected);
    for (Index c = 0; c < expected; ++c) m.col(c) = images[static_cast<std::size_t>(c)];
    Eigen::FullPivLU<Mat> lu(m);
    lu.setThreshold(1e-10);
    EXPECT_EQ(lu.rank(), expected);
    EXPECT_EQ(expected, static_cast<Index>(dof(n, r)));
}

TEST(ComposedOperators, APTMatchesNaive) {
    Rng rng(8);
    // full sampling on a small case, then random samples at n = 20 and n = 30
    {
        const SampleSet s = full_samples(gen_gaussian(6, 2, 1));
        const Mat u = random_orthonormal(6, 2, rng);
        const TangentCoeffs c = random_coeffs(u, rng);
        const Vec naive = apply_A(s, embed_T(u, c));
        EXPECT_LE((apply_A_PT(s, u, c) - naive).norm(), 1e-11 * naive.norm());
    }
    for (Index n : {20, 30}) {
        for (bool wr : {false, true}) {
            const SampleSet s = random_samples(n, 3 * n, rng, wr);
            const Mat u = random_orthonormal(n, 3, rng);
            const TangentCoeffs c = random_coeffs(u, rng);
            const Vec naive = apply_A(s, embed_T(u, c));
            EXPECT_LE((apply_A_PT(s, u, c) - naive).norm(), 1e-11 * naive.norm());
            EXPECT_EQ(apply_A_PT(s, u, TangentCoeffs::zero(n, 3)), Vec::Zero(s.m() + n));
        }
    }
}

TEST(ComposedOperators, PTStarAStarMatchesNaiveAndIsAdjoint) {
    Rng rng(9);
    for (Index n : {10, 20, 30}) {
        const SampleSet s = random_samples(n, 4 * n, rng);
        const Mat u = random_orthonormal(n, 2, rng);
        const Vec y = rng.normal_vector(s.m() + n);
        const TangentCoeffs fast = apply_PTstar_Astar(s, u, y);
        const TangentCoeffs naive = project_T_star(u, apply_A_star(s, y));
        EXPECT_LE((fast - naive).norm(), 1e-11 * naive.norm());
        const TangentCoeffs zero = apply_PTstar_Astar(s, u, Vec::Zero(s.m() + n));
        EXPECT_EQ(zero.norm(), 0.0);
        for (int t = 0; t < 10; ++t) {
            const TangentCoeffs c = random_coeffs(u, rng);
            const Vec yy = rng.normal_vector(s.m() + n);
            const double lhs = apply_A_PT(s, u, c).dot(yy);
            const double rhs = inner(c, apply_PTstar_Astar(s, u, yy));
            EXPECT_NEAR(lhs, rhs, 1e-10 * c.norm() * yy.norm() * n);
        }
    }
}

TEST(TransferCoeffs, IdentityZeroAndNaive) {
    Rng rng(10);
    const Mat u = random_orthonormal(14, 3, rng);
    const TangentCoeffs c = random_coeffs(u, rng);
    EXPECT_LE((transfer_coeffs(u, c, u) - c).norm(), 1e-12 * c.norm());
    EXPECT_EQ(transfer_coeffs(u, TangentCoeffs::zero(14, 3), u).norm(), 0.0);
    for (Index r_new : {1, 3, 5}) {
        const Mat v = random_orthonormal(14, r_new, rng);
        const TangentCoeffs fast = transfer_coeffs(u, c, v);
        const TangentCoeffs naive = project_T_star(v, embed_T(u, c));
        EXPECT_LE((fast - naive).norm(), 1e-12 * c.norm());
    }
    EXPECT_EQ(transfer_coeffs(u, c, Mat(14, 0)).rank(), 0);
}
