#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "lmoapprox/errors.hpp"
#include "lmoapprox/gaussian.hpp"
#include "lmoapprox/quadrature.hpp"

using namespace lmoapprox;

namespace {

GaussianJoint joint2(Eigen::Vector2d m, Eigen::Matrix2d c) {
    return GaussianJoint(LabelSet::of({1, 2}), 1, m, c);
}

GaussianJoint example_r12() {
    Eigen::Matrix2d c;
    c << 1.2, 1.0, 1.0, 2.2;
    return joint2({1.1, 2.1}, c);
}

double eval(const GaussianJoint& g, std::initializer_list<double> x) {
    const std::vector<double> v(x);
    return g.evaluate(v);
}

}  // namespace

TEST(Marginalize, ExampleR12OntoFirstLabel) {
    const auto m = marginalize(example_r12(), LabelSet::of({1}));
    EXPECT_EQ(m.block(), LabelSet::of({1}));
    EXPECT_EQ(m.mean()[0], 1.1);
    EXPECT_EQ(m.cov()(0, 0), 1.2);
}

TEST(Marginalize, FullBlockIsIdentity) {
    const auto g = example_r12();
    EXPECT_EQ(marginalize(g, g.block()), g);
}

TEST(Marginalize, RejectsForeignOrEmptyBlock) {
    const auto g = example_r12();
    EXPECT_THROW(marginalize(g, LabelSet::of({3})), DomainError);
    EXPECT_THROW(marginalize(g, LabelSet()), DomainError);
}

TEST(Marginalize, RepairedR123OntoThirdLabelMatchesGrid) {
    const Eigen::Matrix3d r = lmotest::repaired_r123();
    const GaussianJoint g(LabelSet::of({1, 2, 3}), 1, Eigen::Vector3d(1.2, 2.2, 8.2), r);
    const auto m = marginalize(g, LabelSet::of({3}));
    EXPECT_EQ(m.mean()[0], 8.2);
    EXPECT_NEAR(m.cov()(0, 0), r(2, 2), 1e-15);

    // Oracle: integrate the 3-D density over x1, x2 at a few x3 values.
    const Eigen::Vector3d mean(1.2, 2.2, 8.2);
    const Eigen::MatrixXd cov = r;
    for (double x3 : {7.0, 8.2, 9.5}) {
        const auto f = [&](const std::vector<double>& x) {
            return lmotest::oracle_gaussian_pdf(Eigen::Vector3d(x[0], x[1], x3), mean, cov);
        };
        const double s1 = std::sqrt(r(0, 0)), s2 = std::sqrt(r(1, 1));
        const double integral =
            lmotest::oracle_trapz(f, {{1.2 - 9 * s1, 1.2 + 9 * s1}, {2.2 - 9 * s2, 2.2 + 9 * s2}}, 801);
        EXPECT_NEAR(integral, lmotest::oracle_normal_pdf(x3, 8.2, r(2, 2)), 1e-4) << "x3=" << x3;
    }
}

TEST(Marginalize, CommutesWithFurtherMarginalization) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto cov = lmotest::random_spd(rng, 4);
        Eigen::VectorXd mean = Eigen::VectorXd::LinSpaced(4, -1.0, 2.0);
        const GaussianJoint g(LabelSet::of({1, 2, 3, 4}), 1, mean, cov);
        const auto a = LabelSet::of({1, 3, 4});
        const auto b = LabelSet::of({3, 4});
        EXPECT_EQ(marginalize(marginalize(g, a), b), marginalize(g, b));
    }
}

TEST(Marginalize, MarginalsIntegrateToOne) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const GaussianJoint g(LabelSet::of({1, 2, 3}), 1, Eigen::Vector3d(0.5, -1.0, 2.0),
                              lmotest::random_spd(rng, 3));
        for (auto keep : {LabelSet::of({2}), LabelSet::of({1, 3})}) {
            const auto m = marginalize(g, keep);
            Box box;
            for (std::size_t i = 0; i < m.dim(); ++i) {
                const double s = std::sqrt(m.cov()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
                box.emplace_back(m.mean()[static_cast<Eigen::Index>(i)] - 9 * s,
                                 m.mean()[static_cast<Eigen::Index>(i)] + 9 * s);
            }
            const double integral = lmotest::oracle_trapz(
                [&](const std::vector<double>& x) { return m.evaluate(x); }, box, 401);
            EXPECT_NEAR(integral, 1.0, 1e-5);
        }
    }
}

TEST(Evaluate, StandardNormalAndTranslation) {
    EXPECT_NEAR(eval(GaussianJoint::scalar(0.0, 1.0), {0.0}), 0.398942280401432678, 1e-15);
    EXPECT_EQ(eval(GaussianJoint::scalar(1.0, 1.0), {1.0}), eval(GaussianJoint::scalar(0.0, 1.0), {0.0}));
}

TEST(Evaluate, DimensionMismatchThrows) {
    const auto g = example_r12();
    const std::vector<double> x{1.0};
    EXPECT_THROW((void)g.evaluate(x), DomainError);
}

TEST(Evaluate, MatchesExplicitInverseOracle) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 50; ++trial) {
        const auto cov = lmotest::random_spd(rng, 3);
        const Eigen::Vector3d mean(normal(rng), normal(rng), normal(rng));
        const GaussianJoint g(LabelSet::of({1, 2, 3}), 1, mean, cov);
        const Eigen::Vector3d x = mean + Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
        const std::vector<double> xv(x.data(), x.data() + 3);
        const double expected = lmotest::oracle_gaussian_pdf(x, mean, cov);
        EXPECT_NEAR(g.evaluate(xv), expected, 1e-12 * std::max(1.0, expected));
        EXPECT_NEAR(g.log_evaluate(xv), std::log(expected), 1e-10);
    }
}

TEST(Evaluate, ExampleR3IntegratesToOne) {
    const auto g = GaussianJoint::scalar(8.0, 3.0);
    const auto grid = QuadratureGrid::uniform(1, -10.0, 26.0, 401);
    EXPECT_NEAR(integrate_on_grid([&](std::span<const double> x) { return g.evaluate(x); }, grid), 1.0, 1e-6);
}

TEST(GaussianJoint, RejectsAsymmetricAndIndefinite) {
    Eigen::Matrix2d asym;
    asym << 1.0, 0.5, 0.5 + 1e-8, 1.0;
    EXPECT_THROW(joint2({0, 0}, asym), ValidationError);
    Eigen::Matrix2d bad;
    bad << 1.2, 2.0, 2.0, 2.2;
    EXPECT_THROW(joint2({0, 0}, bad), ValidationError);
    EXPECT_THROW(GaussianJoint(LabelSet::of({1, 2}), 1, Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3)),
                 DomainError);
}

TEST(GaussianKld, ClosedFormExamples) {
    const auto g = example_r12();
    EXPECT_EQ(gaussian_kld(g, g), 0.0);
    EXPECT_NEAR(gaussian_kld(GaussianJoint::scalar(0, 1), GaussianJoint::scalar(1, 1)), 0.5, 1e-15);
    EXPECT_THROW(gaussian_kld(g, GaussianJoint::scalar(0, 1)), DomainError);
    EXPECT_THROW(gaussian_kld(g, g.relabel(LabelSet::of({1, 3}))), DomainError);
}

TEST(GaussianKld, JointVersusProductOfMarginals) {
    const auto f = example_r12();
    Eigen::Matrix2d diag = Eigen::Matrix2d::Zero();
    diag(0, 0) = 1.2;
    diag(1, 1) = 2.2;
    const auto g = joint2({1.1, 2.1}, diag);
    const double closed = gaussian_kld(f, g);
    EXPECT_NEAR(closed, 0.2380413376610589, 1e-12);
    const double grid = lmotest::oracle_trapz(
        [&](const std::vector<double>& x) {
            const double fx = f.evaluate(x);
            return fx > 0.0 ? fx * (f.log_evaluate(x) - g.log_evaluate(x)) : 0.0;
        },
        {{1.1 - 9 * std::sqrt(1.2), 1.1 + 9 * std::sqrt(1.2)}, {2.1 - 9 * std::sqrt(2.2), 2.1 + 9 * std::sqrt(2.2)}},
        401);
    EXPECT_NEAR(grid, closed, 1e-4);
}

TEST(GaussianKld, NonnegativeAndZeroOnlyForEqualArguments) {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> normal;
    const auto block = LabelSet::of({1, 2});
    for (int trial = 0; trial < 100; ++trial) {
        const GaussianJoint a(block, 1, Eigen::Vector2d(normal(rng), normal(rng)), lmotest::random_spd(rng, 2));
        const GaussianJoint b(block, 1, Eigen::Vector2d(normal(rng), normal(rng)), lmotest::random_spd(rng, 2));
        EXPECT_GT(gaussian_kld(a, b), 0.0);
        EXPECT_GT(gaussian_kld(b, a), 0.0);
        EXPECT_NEAR(gaussian_kld(a, a), 0.0, 1e-12);
        EXPECT_NEAR(gaussian_kld(b, b), 0.0, 1e-12);
    }
}

TEST(GaussianKld, AgreesWithGridOnRandomInstances) {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 6; ++trial) {
        const Eigen::Index dim = 1 + trial % 2;
        const LabelSet block = dim == 1 ? LabelSet::of({1}) : LabelSet::of({1, 2});
        Eigen::VectorXd ma(dim), mb(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            ma[i] = normal(rng);
            mb[i] = ma[i] + 0.5 * normal(rng);
        }
        const GaussianJoint a(block, 1, ma, lmotest::random_spd(rng, dim, 0.5));
        const GaussianJoint b(block, 1, mb, lmotest::random_spd(rng, dim, 0.5));
        Box box;
        for (Eigen::Index i = 0; i < dim; ++i) {
            const double s = std::sqrt(a.cov()(i, i));
            box.emplace_back(ma[i] - 10 * s, ma[i] + 10 * s);
        }
        const double grid = lmotest::oracle_trapz(
            [&](const std::vector<double>& x) {
                return a.evaluate(x) * (a.log_evaluate(x) - b.log_evaluate(x));
            },
            box, dim == 1 ? 2001 : 401);
        EXPECT_NEAR(grid, gaussian_kld(a, b), 1e-4) << "trial " << trial;
    }
}

TEST(GaussianCrossEntropy, EqualsEntropyPlusKld) {
    std::mt19937_64 rng(5);
    const GaussianJoint a(LabelSet::of({1, 2}), 1, Eigen::Vector2d(0.3, -0.2), lmotest::random_spd(rng, 2));
    const GaussianJoint b(LabelSet::of({1, 2}), 1, Eigen::Vector2d(1.0, 0.4), lmotest::random_spd(rng, 2));
    EXPECT_NEAR(gaussian_cross_entropy(a, b), a.entropy() + gaussian_kld(a, b), 1e-12);
}

TEST(Mixture, EvaluateAndIntegral) {
    GaussianMixture empty;
    const std::vector<double> x{0.3};
    EXPECT_EQ(mixture_evaluate(empty, x), 0.0);
    EXPECT_EQ(mixture_integral(empty), 0.0);
    EXPECT_EQ(empty.log_evaluate(x), -std::numeric_limits<double>::infinity());

    GaussianMixture one;
    one.add(1.0, GaussianJoint::scalar(0.5, 2.0));
    EXPECT_EQ(mixture_evaluate(one, x), GaussianJoint::scalar(0.5, 2.0).evaluate(x));

    GaussianMixture two;
    two.add(0.2, GaussianJoint::scalar(0.0, 1.0));
    two.add(0.3, GaussianJoint::scalar(1.0, 4.0));
    EXPECT_DOUBLE_EQ(mixture_integral(two), 0.5);
    EXPECT_NEAR(std::exp(two.log_evaluate(x)), mixture_evaluate(two, x), 1e-15);
}

TEST(Mixture, RejectsBadComponents) {
    GaussianMixture mix;
    EXPECT_THROW(mix.add(-0.1, GaussianJoint::scalar(0, 1)), ValidationError);
    EXPECT_THROW(mix.add(0.5, example_r12()), DomainError);
    const std::vector<double> x{0.0, 0.0};
    mix.add(1.0, GaussianJoint::scalar(0, 1));
    EXPECT_THROW((void)mixture_evaluate(mix, x), DomainError);
}

TEST(Mixture, ExampleUnlabeledPhdAtEight) {
    const auto pi = lmotest::example_density();
    const auto v = unlabeled_phd(pi);
    EXPECT_NEAR(mixture_integral(v), 2.5, 1e-12);
    EXPECT_NEAR(mixture_integral(v), mean_cardinality(cardinality_from_weights(pi.weights())), 1e-12);
    const std::vector<double> x{8.0};
    EXPECT_NEAR(mixture_evaluate(v, x), 0.31095540642102987, 1e-12);
}

TEST(NearestPd, IdempotentOnPdInput) {
    const Eigen::Matrix2d r12 = example_r12().cov();
    EXPECT_TRUE(nearest_pd(r12, 1e-6).isApprox(r12, 1e-14));
    const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
    EXPECT_TRUE(nearest_pd(id, 1e-6).isApprox(id, 1e-15));
    EXPECT_THROW(nearest_pd(id, 0.0), DomainError);
    EXPECT_THROW(nearest_pd(Eigen::MatrixXd::Identity(2, 3), 1e-3), DomainError);
}

TEST(NearestPd, RepairsExampleR123) {
    const auto params = lmotest::example_parameters(false);
    const Eigen::MatrixXd raw = params.conditionals.at(LabelSet::of({1, 2, 3}).mask()).cov;
    EXPECT_NEAR(raw(0, 0) * raw(1, 1) - raw(0, 1) * raw(1, 0), -1.36, 1e-12);
    EXPECT_FALSE(diagnose_covariance(raw).positive_definite());
    const double floor = default_pd_floor(raw);
    EXPECT_NEAR(floor, 0.00438194, 1e-7);
    const Eigen::MatrixXd fixed = nearest_pd(raw, floor);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fixed);
    EXPECT_NEAR(es.eigenvalues().minCoeff(), floor, 1e-12);
    EXPECT_TRUE(fixed.isApprox(lmotest::repaired_r123(), 1e-12));
}

TEST(NearestPd, FrobeniusMinimalAmongClampedCandidates) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd a(3, 3);
        for (Eigen::Index i = 0; i < 9; ++i) a.data()[i] = normal(rng);
        a = 0.5 * (a + a.transpose()).eval();
        const double floor = 0.1;
        const Eigen::MatrixXd fixed = nearest_pd(a, floor);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
        EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(fixed).eigenvalues().minCoeff(), floor - 1e-12);
        // Any other eigenvalue choice >= floor in the same basis is farther away.
        const double best = (fixed - a).norm();
        std::uniform_real_distribution<double> bump(0.0, 0.5);
        for (int k = 0; k < 10; ++k) {
            Eigen::VectorXd lam = es.eigenvalues().cwiseMax(floor);
            lam[k % 3] += bump(rng);
            const Eigen::MatrixXd other = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
            EXPECT_GE((other - a).norm(), best - 1e-12);
        }
    }
}

TEST(Sampling, EmpiricalMomentsMatch) {
    const auto g = example_r12();
    std::mt19937_64 rng(1);
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    Eigen::Matrix2d sq = Eigen::Matrix2d::Zero();
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd s = g.sample(rng);
        sum += s;
        sq += (s - g.mean()) * (s - g.mean()).transpose();
    }
    EXPECT_TRUE((sum / n).isApprox(g.mean(), 1e-2));
    EXPECT_LT(((sq / n) - g.cov()).cwiseAbs().maxCoeff(), 0.03);
}
