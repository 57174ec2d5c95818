#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "lmoapprox/errors.hpp"
#include "lmoapprox/quadrature.hpp"

using namespace lmoapprox;

namespace {

class ThreadGuard {
public:
    ThreadGuard() : saved_(worker_threads()) {}
    ~ThreadGuard() { set_worker_threads(saved_); }

private:
    int saved_;
};

double bumpy(std::span<const double> x) {
    double v = 1.0;
    for (double xi : x) v *= std::exp(-0.5 * xi * xi) * (1.0 + 0.3 * std::sin(3.0 * xi));
    return v;
}

}  // namespace

TEST(QuadratureGrid, RejectsBadAxes) {
    EXPECT_THROW(QuadratureGrid({{1.0, 1.0, 5}}), DomainError);
    EXPECT_THROW(QuadratureGrid({{0.0, 1.0, 1}}), DomainError);
    EXPECT_THROW(QuadratureGrid({{2.0, 1.0, 5}}), DomainError);
}

TEST(QuadratureGrid, WeightsSumToBoxVolume) {
    const QuadratureGrid grid({{-1.0, 2.0, 7}, {0.0, 0.5, 5}});
    double fine = 0.0, coarse = 0.0;
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        fine += grid.weight(i);
        coarse += grid.coarse_weight(i);
    }
    EXPECT_NEAR(fine, 1.5, 1e-14);
    EXPECT_NEAR(coarse, 1.5, 1e-14);
    EXPECT_TRUE(grid.nests_coarse());
    EXPECT_FALSE(QuadratureGrid({{0.0, 1.0, 4}}).nests_coarse());
}

TEST(IntegrateOnGrid, StandardNormal) {
    const auto grid = QuadratureGrid::uniform(1, -8.0, 8.0, 801);
    const double v = integrate_on_grid(
        [](std::span<const double> x) { return lmotest::oracle_normal_pdf(x[0], 0.0, 1.0); }, grid);
    EXPECT_NEAR(v, 1.0, 1e-8);
}

TEST(IntegrateOnGrid, ZeroIntegrand) {
    const auto grid = QuadratureGrid::uniform(3, -1.0, 1.0, 21);
    EXPECT_EQ(integrate_on_grid([](std::span<const double>) { return 0.0; }, grid), 0.0);
}

TEST(IntegrateOnGrid, ExampleR12TwoDimensional) {
    Eigen::Matrix2d c;
    c << 1.2, 1.0, 1.0, 2.2;
    const GaussianJoint g(LabelSet::of({1, 2}), 1, Eigen::Vector2d(1.1, 2.1), c);
    const auto grid = QuadratureGrid::uniform(2, -8.0, 12.0, 301);
    EXPECT_NEAR(integrate_on_grid([&](std::span<const double> x) { return g.evaluate(x); }, grid), 1.0, 1e-5);
}

TEST(IntegrateOnGrid, RefusesAboveThreeDimensions) {
    const auto grid = QuadratureGrid::uniform(4, -1.0, 1.0, 3);
    const auto f = [](std::span<const double>) { return 1.0; };
    EXPECT_THROW(integrate_on_grid(f, grid), NumericalRefusal);
    EXPECT_THROW(integrate_on_grid_serial(f, grid), NumericalRefusal);
    EXPECT_THROW(integrate_refined(f, grid), NumericalRefusal);
}

TEST(IntegrateOnGrid, MatchesNestedLoopOracle) {
    const std::vector<std::pair<double, double>> box{{-4.0, 3.0}, {-2.5, 4.0}, {-3.0, 3.0}};
    for (std::size_t dim = 1; dim <= 3; ++dim) {
        const int m = dim == 3 ? 41 : 101;
        std::vector<GridAxis> axes;
        for (std::size_t k = 0; k < dim; ++k) axes.push_back({box[k].first, box[k].second, static_cast<std::size_t>(m)});
        const QuadratureGrid grid(axes);
        const std::vector<std::pair<double, double>> sub(box.begin(), box.begin() + static_cast<long>(dim));
        const double oracle = lmotest::oracle_trapz([](const std::vector<double>& x) { return bumpy(x); }, sub, m);
        EXPECT_NEAR(integrate_on_grid(bumpy, grid), oracle, 1e-12) << "dim " << dim;
    }
}

TEST(IntegrateOnGrid, ParallelMatchesSerial) {
    ThreadGuard guard;
    for (std::size_t dim = 1; dim <= 3; ++dim) {
        const auto grid = QuadratureGrid::uniform(dim, -5.0, 5.0, dim == 3 ? 81 : 1001);
        const double serial = integrate_on_grid_serial(bumpy, grid);
        const double parallel = integrate_on_grid(bumpy, grid);
        EXPECT_NEAR(parallel, serial, 1e-12 * std::max(1.0, std::abs(serial)));
        const auto rs = integrate_refined_serial(bumpy, grid);
        const auto rp = integrate_refined(bumpy, grid);
        EXPECT_NEAR(rp.fine, rs.fine, 1e-12);
        EXPECT_NEAR(rp.coarse, rs.coarse, 1e-12);
    }
}

TEST(IntegrateOnGrid, BitwiseIdenticalAcrossThreadCounts) {
    ThreadGuard guard;
    const auto grid = QuadratureGrid::uniform(3, -5.0, 5.0, 61);
    set_worker_threads(1);
    const double one = integrate_on_grid(bumpy, grid);
    const auto ref_one = integrate_refined(bumpy, grid);
    for (int t : {2, 3, 8}) {
        set_worker_threads(t);
        EXPECT_EQ(integrate_on_grid(bumpy, grid), one) << t << " threads";
        const auto r = integrate_refined(bumpy, grid);
        EXPECT_EQ(r.fine, ref_one.fine);
        EXPECT_EQ(r.coarse, ref_one.coarse);
    }
}

TEST(IntegrateRefined, CoarseIsHalfResolutionGrid) {
    const auto fine_grid = QuadratureGrid::uniform(2, -3.0, 3.0, 21);
    const auto coarse_grid = QuadratureGrid::uniform(2, -3.0, 3.0, 11);
    const auto r = integrate_refined(bumpy, fine_grid);
    EXPECT_NEAR(r.fine, integrate_on_grid(bumpy, fine_grid), 1e-14);
    EXPECT_NEAR(r.coarse, integrate_on_grid(bumpy, coarse_grid), 1e-14);
    EXPECT_EQ(r.delta(), std::abs(r.fine - r.coarse));
    EXPECT_THROW(integrate_refined(bumpy, QuadratureGrid::uniform(1, 0.0, 1.0, 10)), DomainError);
}
