#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "graphon_cheeger/core.hpp"
#include "graphon_cheeger/spectral.hpp"
#include "test_support.hpp"

namespace gc = graphon_cheeger;
using gc::StepGraphon;

namespace {

StepGraphon ones(std::size_t n) { return StepGraphon::create(Eigen::MatrixXd::Ones(n, n)); }

StepGraphon bipartite_pair() {
    Eigen::MatrixXd k(2, 2);
    k << 0, 1, 1, 0;
    return StepGraphon::create(k);
}

gc::ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const gc::Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected gc::Error";
    return gc::ErrorCode::InvalidArgument;
}

}  // namespace

TEST(NormalizedOperator, Examples) {
    Eigen::MatrixXd expected(2, 2);
    expected << 0.5, -0.5, -0.5, 0.5;
    EXPECT_LT((gc::normalized_operator(ones(2)) - expected).cwiseAbs().maxCoeff(), 1e-15);
    expected << 1, -1, -1, 1;
    EXPECT_LT((gc::normalized_operator(bipartite_pair()) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(NormalizedOperator, AnnihilatesDegreeVector) {
    gc::testing::Rng rng(21);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = gc::testing::uniform_index(rng, 1, 30);
        const StepGraphon w = gc::testing::random_connected_graphon(rng, n);
        Eigen::VectorXd root(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) root[static_cast<Eigen::Index>(i)] = std::sqrt(w.degree(i) / double(n));
        EXPECT_LT((gc::normalized_operator(w) * root).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(NormalizedOperator, QuotientMatchesGraphonRayleigh) {
    gc::testing::Rng rng(22);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = gc::testing::uniform_index(rng, 2, 25);
        const StepGraphon w = gc::testing::random_connected_graphon(rng, n);
        Eigen::VectorXd f(static_cast<Eigen::Index>(n));
        for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = gc::testing::uniform(rng, -1, 1);
        Eigen::VectorXd u = f;
        for (std::size_t i = 0; i < n; ++i) u[static_cast<Eigen::Index>(i)] *= std::sqrt(w.degree(i) / double(n));
        const double ordinary = u.dot(gc::normalized_operator(w) * u) / u.squaredNorm();
        EXPECT_NEAR(ordinary, gc::rayleigh(w, f), 1e-12);
    }
}

TEST(EigenK, ConstantKernel) {
    const gc::SpectralBasis b = gc::eigen_k(ones(4), 2);
    ASSERT_EQ(b.eigenvalues.size(), 2u);
    EXPECT_NEAR(b.eigenvalues[0], 0.0, 1e-12);
    EXPECT_NEAR(b.eigenvalues[1], 1.0, 1e-12);
}

TEST(EigenK, BipartitePair) {
    const gc::SpectralBasis b = gc::eigen_k(bipartite_pair(), 2);
    EXPECT_NEAR(b.eigenvalues[0], 0.0, 1e-12);
    EXPECT_NEAR(b.eigenvalues[1], 2.0, 1e-12);
}

TEST(EigenK, FirstEigenfunctionIsConstant) {
    gc::testing::Rng rng(23);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = gc::testing::uniform_index(rng, 1, 30);
        const StepGraphon w = gc::testing::random_connected_graphon(rng, n);
        const gc::SpectralBasis b = gc::eigen_k(w, 1);
        EXPECT_LE(std::abs(b.eigenvalues[0]), 1e-10);
        const gc::VertexFunction& f = b.functions[0];
        EXPECT_GT(f[0], 0.0);
        EXPECT_LT(f.maxCoeff() - f.minCoeff(), 1e-9);
    }
}

TEST(EigenK, Errors) {
    EXPECT_EQ(code_of([] { gc::eigen_k(ones(3), 4); }), gc::ErrorCode::KTooLarge);
    const StepGraphon disconnected = StepGraphon::create(Eigen::MatrixXd::Identity(3, 3), false);
    EXPECT_EQ(code_of([&] { gc::eigen_k(disconnected, 2); }), gc::ErrorCode::Disconnected);
    EXPECT_EQ(code_of([&] { gc::lambda_k_graphon(disconnected, 2); }), gc::ErrorCode::Disconnected);
}

TEST(EigenK, MatchesJacobiOracle) {
    gc::testing::Rng rng(24);
    for (int t = 0; t < 25; ++t) {
        const std::size_t n = gc::testing::uniform_index(rng, 1, 24);
        const StepGraphon w = gc::testing::random_connected_graphon(rng, n);
        const std::vector<double> oracle = gc::testing::jacobi_eigenvalues(gc::normalized_operator(w));
        const gc::SpectralBasis b = gc::eigen_k(w, n);
        for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(b.eigenvalues[j], oracle[j], 1e-10);
    }
}

TEST(EigenK, BasisInvariants) {
    gc::testing::Rng rng(25);
    for (int t = 0; t < 40; ++t) {
        const std::size_t n = gc::testing::uniform_index(rng, 2, 40);
        const std::size_t k = gc::testing::uniform_index(rng, 1, std::min<std::size_t>(n, 6));
        const StepGraphon w = gc::testing::random_connected_graphon(rng, n);
        const gc::SpectralBasis b = gc::eigen_k(w, k);
        const Eigen::MatrixXd l = gc::normalized_operator(w);
        for (std::size_t i = 0; i < k; ++i) {
            EXPECT_GE(b.eigenvalues[i], -1e-10);
            EXPECT_LE(b.eigenvalues[i], 2.0 + 1e-10);
            if (i > 0) {
                EXPECT_LE(b.eigenvalues[i - 1], b.eigenvalues[i]);
            }
            EXPECT_NEAR(gc::rayleigh(w, b.functions[i]), b.eigenvalues[i], 1e-9);
            const Eigen::VectorXd u = b.symmetric_vectors.col(static_cast<Eigen::Index>(i));
            EXPECT_LE((l * u - b.eigenvalues[i] * u).cwiseAbs().maxCoeff(), 1e-8);
            for (std::size_t j = 0; j < k; ++j) {
                EXPECT_NEAR(gc::inner_v(w, b.functions[i], b.functions[j]), i == j ? 1.0 : 0.0, 1e-10);
            }
        }
        const gc::Embedding emb = gc::build_embedding(w, b);
        double total = 0.0;
        for (std::size_t x = 0; x < n; ++x) total += emb.cell_mass(x);
        EXPECT_NEAR(total, double(k), 1e-9);
    }
}

TEST(EigenK, DeterministicOutput) {
    gc::testing::Rng rng(26);
    const StepGraphon w = gc::testing::random_connected_graphon(rng, 20);
    const gc::SpectralBasis a = gc::eigen_k(w, 4);
    const gc::SpectralBasis b = gc::eigen_k(w, 4);
    EXPECT_EQ(a.eigenvalues, b.eigenvalues);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_TRUE((a.functions[j].array() == b.functions[j].array()).all());
}

TEST(LambdaKGraphon, Examples) {
    EXPECT_NEAR(gc::lambda_k_graphon(ones(4), 2), 1.0, 1e-12);
    EXPECT_NEAR(gc::lambda_k_graphon(ones(4), 1), 0.0, 1e-12);
    EXPECT_EQ(gc::lambda_k_graphon(bipartite_pair(), 2), 1.0);
    EXPECT_EQ(gc::lambda_k_graphon(bipartite_pair(), 3), 1.0);
}

TEST(Refine, AppendsUnitEigenvalues) {
    gc::testing::Rng rng(27);
    const StepGraphon w = gc::testing::random_connected_graphon(rng, 4);
    const StepGraphon fine = gc::refine(w, 3);
    std::vector<double> expected = gc::testing::jacobi_eigenvalues(gc::normalized_operator(w));
    expected.insert(expected.end(), 8, 1.0);
    std::sort(expected.begin(), expected.end());
    const std::vector<double> got = gc::discrete_spectrum(fine);
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-10);
}

TEST(BuildEmbedding, Rows) {
    const StepGraphon w = ones(2);
    const gc::Embedding emb = gc::build_embedding(w, gc::eigen_k(w, 2));
    EXPECT_NEAR(emb.row(0)[0], 1.0, 1e-12);
    EXPECT_NEAR(emb.row(1)[0], 1.0, 1e-12);
    EXPECT_NEAR(std::abs(emb.row(0)[1]), 1.0, 1e-12);
    EXPECT_NEAR(emb.row(0)[1], -emb.row(1)[1], 1e-12);
    EXPECT_NEAR(emb.norm(0), std::sqrt(2.0), 1e-12);

    const gc::Embedding single = gc::build_embedding(w, gc::eigen_k(w, 1));
    EXPECT_EQ(single.k(), 1u);
    EXPECT_NEAR(single.norm(0), std::abs(single.row(0)[0]), 0.0);
    EXPECT_NEAR(single.row(0)[0], single.row(1)[0], 1e-12);
}

TEST(SpreadCheck, Examples) {
    gc::testing::Rng rng(28);
    const StepGraphon w = gc::testing::random_connected_graphon(rng, 12);
    const gc::Embedding emb = gc::build_embedding(w, gc::eigen_k(w, 3));
    const std::vector<double> e1{1, 0, 0};
    EXPECT_NEAR(gc::spread_check(w, emb, e1), 1.0, 1e-9);
    const double r = 1.0 / std::sqrt(2.0);
    const std::vector<double> diag{r, r, 0};
    EXPECT_NEAR(gc::spread_check(w, emb, diag), 1.0, 1e-9);
    const std::vector<double> long_v{1, 1, 0};
    EXPECT_THROW(gc::spread_check(w, emb, long_v), gc::Error);
}

TEST(SpreadCheck, RandomDirections) {
    gc::testing::Rng rng(29);
    for (int t = 0; t < 10; ++t) {
        const std::size_t n = gc::testing::uniform_index(rng, 2, 30);
        const std::size_t k = gc::testing::uniform_index(rng, 1, std::min<std::size_t>(n, 6));
        const StepGraphon w = gc::testing::random_connected_graphon(rng, n);
        const gc::Embedding emb = gc::build_embedding(w, gc::eigen_k(w, k));
        for (int i = 0; i < 100; ++i) {
            const std::vector<double> v = gc::testing::random_unit_vector(rng, k);
            EXPECT_NEAR(gc::spread_check(w, emb, v), 1.0, 1e-9);
        }
    }
}
