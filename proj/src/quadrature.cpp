#include "lmoapprox/quadrature.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <omp.h>

#include "lmoapprox/errors.hpp"

namespace lmoapprox {

namespace {

// Nodes per reduction block. Fixed so that the association order of the
// parallel sum is independent of the number of threads.
constexpr std::size_t kBlockSize = 4096;

double axis_weight(const GridAxis& a, std::size_t i, double h) {
    return (i == 0 || i + 1 == a.points) ? 0.5 * h : h;
}

void check_dim(const QuadratureGrid& grid) {
    if (grid.dim() > kMaxGridDim) {
        throw NumericalRefusal("grid quadrature refused for dimension " + std::to_string(grid.dim()) +
                               " (exact mode supports at most " + std::to_string(kMaxGridDim) + ")");
    }
}

void check_nested(const QuadratureGrid& grid) {
    if (!grid.nests_coarse()) throw DomainError("refined quadrature needs an odd point count on every axis");
}

}  // namespace

QuadratureGrid::QuadratureGrid(std::vector<GridAxis> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw DomainError("quadrature grid needs at least one axis");
    for (const auto& a : axes_) {
        if (!(a.lo < a.hi) || !std::isfinite(a.lo) || !std::isfinite(a.hi)) {
            throw DomainError("quadrature axis needs finite lo < hi");
        }
        if (a.points < 2) throw DomainError("quadrature axis needs at least 2 points");
        node_count_ *= a.points;
    }
}

QuadratureGrid QuadratureGrid::uniform(std::size_t dim, double lo, double hi, std::size_t points) {
    return QuadratureGrid(std::vector<GridAxis>(dim, GridAxis{lo, hi, points}));
}

double QuadratureGrid::spacing(std::size_t axis) const {
    const auto& a = axes_.at(axis);
    return (a.hi - a.lo) / static_cast<double>(a.points - 1);
}

void QuadratureGrid::node(std::size_t flat, std::span<double> out) const {
    for (std::size_t k = axes_.size(); k-- > 0;) {
        const auto& a = axes_[k];
        const std::size_t i = flat % a.points;
        flat /= a.points;
        out[k] = a.lo + static_cast<double>(i) * spacing(k);
    }
}

double QuadratureGrid::weight(std::size_t flat) const {
    double w = 1.0;
    for (std::size_t k = axes_.size(); k-- > 0;) {
        const auto& a = axes_[k];
        const std::size_t i = flat % a.points;
        flat /= a.points;
        w *= axis_weight(a, i, spacing(k));
    }
    return w;
}

double QuadratureGrid::coarse_weight(std::size_t flat) const {
    double w = 1.0;
    for (std::size_t k = axes_.size(); k-- > 0;) {
        const auto& a = axes_[k];
        const std::size_t i = flat % a.points;
        flat /= a.points;
        if (i % 2 != 0) return 0.0;
        const std::size_t coarse_points = (a.points + 1) / 2;
        const double h = 2.0 * spacing(k);
        const std::size_t ci = i / 2;
        w *= (ci == 0 || ci + 1 == coarse_points) ? 0.5 * h : h;
    }
    return w;
}

bool QuadratureGrid::nests_coarse() const {
    for (const auto& a : axes_) {
        if (a.points % 2 == 0 || a.points < 3) return false;
    }
    return true;
}

double RefinedIntegral::delta() const {
    if (std::isinf(fine) && std::isinf(coarse) && fine == coarse) return 0.0;
    return std::abs(fine - coarse);
}

double integrate_on_grid(const Integrand& f, const QuadratureGrid& grid) {
    check_dim(grid);
    const std::size_t n = grid.node_count();
    const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<double> partial(blocks, 0.0);
    const auto nblocks = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel
    {
        std::vector<double> x(grid.dim());
#pragma omp for schedule(static)
        for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
            const std::size_t begin = static_cast<std::size_t>(b) * kBlockSize;
            const std::size_t end = std::min(n, begin + kBlockSize);
            double s = 0.0;
            for (std::size_t i = begin; i < end; ++i) {
                grid.node(i, x);
                s += grid.weight(i) * f(x);
            }
            partial[static_cast<std::size_t>(b)] = s;
        }
    }
    double total = 0.0;
    for (double s : partial) total += s;
    return total;
}

double integrate_on_grid_serial(const Integrand& f, const QuadratureGrid& grid) {
    check_dim(grid);
    std::vector<double> x(grid.dim());
    double total = 0.0;
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        grid.node(i, x);
        total += grid.weight(i) * f(x);
    }
    return total;
}

RefinedIntegral integrate_refined(const Integrand& f, const QuadratureGrid& grid) {
    check_dim(grid);
    check_nested(grid);
    const std::size_t n = grid.node_count();
    const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<double> fine(blocks, 0.0);
    std::vector<double> coarse(blocks, 0.0);
    const auto nblocks = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel
    {
        std::vector<double> x(grid.dim());
#pragma omp for schedule(static)
        for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
            const std::size_t begin = static_cast<std::size_t>(b) * kBlockSize;
            const std::size_t end = std::min(n, begin + kBlockSize);
            double sf = 0.0;
            double sc = 0.0;
            for (std::size_t i = begin; i < end; ++i) {
                grid.node(i, x);
                const double v = f(x);
                sf += grid.weight(i) * v;
                const double wc = grid.coarse_weight(i);
                if (wc != 0.0) sc += wc * v;
            }
            fine[static_cast<std::size_t>(b)] = sf;
            coarse[static_cast<std::size_t>(b)] = sc;
        }
    }
    RefinedIntegral r;
    for (std::size_t b = 0; b < blocks; ++b) {
        r.fine += fine[b];
        r.coarse += coarse[b];
    }
    return r;
}

RefinedIntegral integrate_refined_serial(const Integrand& f, const QuadratureGrid& grid) {
    check_dim(grid);
    check_nested(grid);
    std::vector<double> x(grid.dim());
    RefinedIntegral r;
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        grid.node(i, x);
        const double v = f(x);
        r.fine += grid.weight(i) * v;
        const double wc = grid.coarse_weight(i);
        if (wc != 0.0) r.coarse += wc * v;
    }
    return r;
}

void set_worker_threads(int n) {
    if (n > 0) omp_set_num_threads(n);
}

int worker_threads() { return omp_get_max_threads(); }

}  // namespace lmoapprox
