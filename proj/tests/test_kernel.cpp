#include <cmath>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include <struct_imitate/kernel.hpp>

#include "support/oracles.hpp"

using namespace struct_imitate;

namespace {

Vector vec(std::initializer_list<double> v)
{
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        out[i++] = x;
    return out;
}

std::vector<Vector> random_inputs(std::mt19937_64& rng, std::size_t n, Eigen::Index dim, double scale)
{
    std::vector<Vector> xs;
    for (std::size_t i = 0; i < n; ++i)
        xs.push_back(oracle::random_vector(rng, dim, scale));
    return xs;
}

struct QuietWarnings {
    QuietWarnings() : previous(set_warning_handler({})) {}
    ~QuietWarnings() { set_warning_handler(previous); }
    WarningHandler previous;
};

} // namespace

TEST(KernelEval, ZeroDistanceIsOne)
{
    KernelConfig cfg;
    Vector x = vec({0.3, -1.2});
    EXPECT_EQ(kernel_eval(x, x, cfg), 1.0);
}

TEST(KernelEval, ScalarGaussianAtKappaSix)
{
    KernelConfig cfg;
    cfg.kappa = 6.0;
    EXPECT_DOUBLE_EQ(kernel_eval(vec({0.0}), vec({1.0}), cfg), std::exp(-6.0));
}

TEST(KernelEval, SymmetricAndInUnitInterval)
{
    std::mt19937_64 rng(7);
    KernelConfig cfg;
    for (int trial = 0; trial < 100; ++trial) {
        Vector a = oracle::random_vector(rng, 3), b = oracle::random_vector(rng, 3);
        double kab = kernel_eval(a, b, cfg);
        EXPECT_EQ(kab, kernel_eval(b, a, cfg));
        EXPECT_GT(kab, 0.0);
        EXPECT_LE(kab, 1.0);
    }
}

TEST(KernelEval, DimensionMismatchThrows)
{
    EXPECT_THROW(kernel_eval(vec({1.0}), vec({1.0, 2.0}), KernelConfig{}), DimensionMismatch);
}

TEST(KernelConfig, RejectsNonPositiveParameters)
{
    KernelConfig cfg;
    cfg.kappa = 0.0;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg = KernelConfig{};
    cfg.lambda = -1.0;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    EXPECT_DOUBLE_EQ(KernelConfig{}.lambda, 1e-5);
}

TEST(GramMatrix, SingleAndDuplicateInputs)
{
    KernelConfig cfg;
    Matrix K1 = gram_matrix({vec({0.5})}, cfg);
    ASSERT_EQ(K1.rows(), 1);
    EXPECT_EQ(K1(0, 0), 1.0);

    Matrix K2 = gram_matrix({vec({0.5}), vec({0.5})}, cfg);
    EXPECT_TRUE(K2.isApprox(Matrix::Ones(2, 2), 0.0));
}

TEST(GramMatrix, EmptyThrows) { EXPECT_THROW(gram_matrix({}, KernelConfig{}), InvalidArgument); }

TEST(GramMatrix, SymmetricPsdWithUnitDiagonal)
{
    std::mt19937_64 rng(11);
    auto xs = random_inputs(rng, 50, 2, 0.7);
    Matrix K = gram_matrix(xs, KernelConfig{});
    EXPECT_TRUE(K == K.transpose());
    for (Eigen::Index i = 0; i < K.rows(); ++i)
        EXPECT_EQ(K(i, i), 1.0);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(K);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
}

TEST(Fit, SinglePointAnalyticAlpha)
{
    KernelConfig cfg;
    cfg.lambda = 0.5;
    auto model = fit({vec({0.2})}, cfg);
    Vector a = alpha_weights(model, vec({0.2}));
    ASSERT_EQ(a.size(), 1);
    EXPECT_NEAR(a[0], 2.0 / 3.0, 1e-15);
}

TEST(Fit, InterpolationLimitReproducesTrainingMean)
{
    QuietWarnings quiet;
    std::mt19937_64 rng(3);
    KernelConfig cfg;
    cfg.kappa = 6.0;
    cfg.lambda = 1e-12;
    std::vector<Vector> xs;
    std::vector<double> ys;
    for (int i = 0; i < 12; ++i) {
        xs.push_back(vec({0.25 * i}));
        ys.push_back(std::sin(0.25 * i) + 0.3 * std::cos(0.7 * i));
    }
    auto model = fit(xs, cfg);
    // Reference coefficients from an independent QR solve of the same system.
    Matrix A = oracle::weighted_system(xs, Vector::Ones(12), cfg.kappa, cfg.lambda);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        Vector a = model.alpha(xs[i]);
        Vector ref = oracle::dense_solve(A, oracle::weighted_kvec(xs, Vector::Ones(12), cfg.kappa, xs[i]));
        double pred = 0.0, pred_ref = 0.0;
        for (std::size_t n = 0; n < xs.size(); ++n) {
            pred += a[static_cast<Eigen::Index>(n)] * ys[n];
            pred_ref += ref[static_cast<Eigen::Index>(n)] * ys[n];
        }
        EXPECT_NEAR(pred, ys[i], 1e-6);
        EXPECT_NEAR(pred, pred_ref, 1e-6);
    }
}

TEST(Fit, UnitWeightsMatchUnweightedAlpha)
{
    std::mt19937_64 rng(5);
    auto xs = random_inputs(rng, 20, 1, 1.0);
    KernelConfig cfg;
    auto plain = fit(xs, cfg);
    auto weighted = fit(xs, Vector::Ones(20), cfg);
    Vector q = oracle::random_vector(rng, 1);
    EXPECT_TRUE(plain.alpha(q).isApprox(weighted.alpha(q), 1e-14));
}

TEST(Fit, ResidualAgainstDirectSolve)
{
    std::mt19937_64 rng(17);
    auto xs = random_inputs(rng, 40, 2, 1.0);
    Vector w = Vector::Ones(40);
    w[3] = 50.0;
    w[17] = 1e4;
    KernelConfig cfg;
    auto model = fit(xs, w, cfg);
    Matrix A = oracle::weighted_system(xs, w, cfg.kappa, cfg.lambda);
    EXPECT_DOUBLE_EQ(model.effective_count(), 38.0 + 50.0 + 1e4);
    for (int trial = 0; trial < 20; ++trial) {
        Vector x = oracle::random_vector(rng, 2);
        Vector k = oracle::weighted_kvec(xs, w, cfg.kappa, x);
        Vector a = model.alpha(x);
        EXPECT_LE((A * a - k).norm(), 1e-9 * k.norm());
        Vector ref = oracle::dense_solve(A, k);
        EXPECT_LE((a - ref).norm(), 1e-10 * std::max(1.0, ref.norm()));
    }
}

TEST(Fit, CommonWeightScalingIsNotNormalizedAway)
{
    std::mt19937_64 rng(19);
    auto xs = random_inputs(rng, 15, 1, 1.0);
    Vector w = Vector::Ones(15);
    w[4] = 30.0;
    KernelConfig cfg;
    const double c = 7.0;
    auto scaled = fit(xs, c * w, cfg);
    EXPECT_DOUBLE_EQ(scaled.effective_count(), c * w.sum());
    Matrix A = oracle::weighted_system(xs, c * w, cfg.kappa, cfg.lambda);
    Vector x = oracle::random_vector(rng, 1);
    Vector ref = oracle::dense_solve(A, oracle::weighted_kvec(xs, c * w, cfg.kappa, x));
    EXPECT_LE((scaled.alpha(x) - ref).norm(), 1e-9 * ref.norm());
}

TEST(Fit, DuplicateInputsAreAccepted)
{
    QuietWarnings quiet;
    KernelConfig cfg;
    auto model = fit({vec({0.0}), vec({0.5}), vec({0.5})}, vec({1.0, 1.0, 100.0}), cfg);
    Vector a = model.alpha(vec({0.5}));
    EXPECT_TRUE(a.allFinite());
}

TEST(Fit, IllConditionedSystemWarnsAndJitters)
{
    std::vector<std::string> messages;
    auto previous = set_warning_handler([&](const std::string& m) { messages.push_back(m); });
    KernelConfig cfg;
    cfg.lambda = 1e-16;
    auto model = fit({vec({0.0}), vec({0.0}), vec({1e-9})}, cfg);
    set_warning_handler(previous);
    EXPECT_TRUE(model.jittered());
    ASSERT_FALSE(messages.empty());
    EXPECT_NE(messages.front().find("condition"), std::string::npos);
}

TEST(Fit, ErrorPaths)
{
    KernelConfig cfg;
    EXPECT_THROW(fit({}, cfg), InvalidArgument);
    EXPECT_THROW(fit({vec({0.0})}, vec({1.0, 2.0}), cfg), DimensionMismatch);
    EXPECT_THROW(fit({vec({0.0})}, vec({0.0}), cfg), InvalidArgument);
    auto model = fit({vec({0.0})}, cfg);
    EXPECT_THROW(model.alpha(vec({0.0, 1.0})), DimensionMismatch);
}

TEST(Fit, DeterministicAcrossThreads)
{
    std::mt19937_64 rng(23);
    auto xs = random_inputs(rng, 120, 2, 1.0);
    KernelConfig cfg;
    Vector x = oracle::random_vector(rng, 2);
    Vector a1 = fit(xs, cfg).alpha(x);
    Vector a2 = fit(xs, cfg).alpha(x);
    EXPECT_LE((a1 - a2).cwiseAbs().maxCoeff(), 1e-12);

    auto model = fit(xs, cfg);
    std::vector<Vector> results(4);
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < results.size(); ++t)
        threads.emplace_back([&, t] { results[t] = model.alpha(x); });
    for (auto& t : threads)
        t.join();
    for (const auto& r : results)
        EXPECT_TRUE(r == results.front());
}
