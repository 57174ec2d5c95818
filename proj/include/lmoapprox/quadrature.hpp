#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lmoapprox {

/// Highest dimension integrated exactly on a tensor grid.
inline constexpr std::size_t kMaxGridDim = 3;

/// One axis of a tensor-product trapezoidal grid.
struct GridAxis {
    double lo;
    double hi;
    std::size_t points;
};

/// Tensor-product trapezoidal grid with m^dim nodes.
class QuadratureGrid {
public:
    /// Throws DomainError unless every axis has lo < hi and points >= 2.
    explicit QuadratureGrid(std::vector<GridAxis> axes);
    static QuadratureGrid uniform(std::size_t dim, double lo, double hi, std::size_t points);

    [[nodiscard]] std::size_t dim() const { return axes_.size(); }
    [[nodiscard]] const std::vector<GridAxis>& axes() const { return axes_; }
    [[nodiscard]] std::size_t node_count() const { return node_count_; }
    [[nodiscard]] double spacing(std::size_t axis) const;

    /// Coordinates of the node with row-major flat index `flat`.
    void node(std::size_t flat, std::span<double> out) const;
    /// Trapezoidal weight of the node.
    [[nodiscard]] double weight(std::size_t flat) const;
    /// Weight of the node in the half-resolution grid made of the nodes
    /// with even index on every axis; zero for other nodes. Only
    /// meaningful when every axis has an odd point count.
    [[nodiscard]] double coarse_weight(std::size_t flat) const;
    /// True if every axis has an odd number of points.
    [[nodiscard]] bool nests_coarse() const;

private:
    std::vector<GridAxis> axes_;
    std::size_t node_count_ = 1;
};

/// Integrand over a grid node. Called concurrently from worker threads,
/// so it must not mutate shared state.
using Integrand = std::function<double(std::span<const double>)>;

/// Trapezoidal estimate, OpenMP-parallel over fixed node blocks. The
/// block partition does not depend on the thread count, so the result is
/// bitwise reproducible. Throws NumericalRefusal when dim > 3.
double integrate_on_grid(const Integrand& f, const QuadratureGrid& grid);

/// Single-threaded reference: one running sum in node order.
double integrate_on_grid_serial(const Integrand& f, const QuadratureGrid& grid);

/// Full-grid estimate together with the nested half-resolution estimate
/// from the same evaluations. |fine - coarse| is the refinement delta.
struct RefinedIntegral {
    double fine = 0.0;
    double coarse = 0.0;
    [[nodiscard]] double delta() const;
};

/// Requires odd point counts on every axis (DomainError otherwise).
RefinedIntegral integrate_refined(const Integrand& f, const QuadratureGrid& grid);
RefinedIntegral integrate_refined_serial(const Integrand& f, const QuadratureGrid& grid);

/// Caps the worker threads used by the parallel kernels (0 = runtime default).
void set_worker_threads(int n);
[[nodiscard]] int worker_threads();

}  // namespace lmoapprox
