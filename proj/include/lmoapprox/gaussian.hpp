#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lmoapprox/labelspace.hpp"

namespace lmoapprox {

/// Symmetry tolerance for covariance input (max |C - C^T|).
inline constexpr double kSymmetryTol = 1e-10;
/// Smallest eigenvalue accepted as positive definite.
inline constexpr double kPdEigenTol = 1e-12;
/// Default nearest_pd floor as a fraction of the largest eigenvalue.
inline constexpr double kDefaultPdFloorRatio = 1e-3;

struct CovarianceDiagnostics {
    double asymmetry = 0.0;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    bool square = true;
    bool finite = true;

    [[nodiscard]] bool symmetric() const { return asymmetry <= kSymmetryTol; }
    [[nodiscard]] bool positive_definite() const { return min_eigenvalue > kPdEigenTol; }
    [[nodiscard]] bool ok() const { return square && finite && symmetric() && positive_definite(); }
};

/// Eigenvalue-level check of a candidate covariance (symmetrized first).
CovarianceDiagnostics diagnose_covariance(const Eigen::MatrixXd& cov);

/// Multivariate Gaussian over a block of labels. Coordinates are stacked
/// per label in canonical order, `state_dim` entries per label.
class GaussianJoint {
public:
    /// Throws ValidationError if the covariance is not symmetric within
    /// 1e-10 or not positive definite, and DomainError on size mismatch.
    GaussianJoint(LabelSet block, std::size_t state_dim, Eigen::VectorXd mean, Eigen::MatrixXd cov);

    /// Unlabeled convenience: block {1}, state_dim = mean.size().
    static GaussianJoint scalar(double mean, double variance);

    [[nodiscard]] LabelSet block() const { return block_; }
    [[nodiscard]] std::size_t state_dim() const { return state_dim_; }
    [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(mean_.size()); }
    [[nodiscard]] const Eigen::VectorXd& mean() const { return mean_; }
    [[nodiscard]] const Eigen::MatrixXd& cov() const { return cov_; }
    /// Lower Cholesky factor L with cov = L L^T.
    [[nodiscard]] const Eigen::MatrixXd& chol() const { return chol_; }
    [[nodiscard]] double log_det() const { return log_det_; }

    [[nodiscard]] double evaluate(std::span<const double> x) const;
    [[nodiscard]] double log_evaluate(std::span<const double> x) const;
    /// Differential entropy 0.5 log det(2 pi e cov).
    [[nodiscard]] double entropy() const;

    [[nodiscard]] Eigen::VectorXd sample(std::mt19937_64& rng) const;

    /// Same distribution relabelled onto another block of equal size.
    [[nodiscard]] GaussianJoint relabel(LabelSet block) const;

    friend bool operator==(const GaussianJoint& a, const GaussianJoint& b) {
        return a.block_ == b.block_ && a.state_dim_ == b.state_dim_ && a.mean_ == b.mean_ && a.cov_ == b.cov_;
    }

private:
    LabelSet block_;
    std::size_t state_dim_ = 1;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
    Eigen::MatrixXd chol_;
    double log_det_ = 0.0;
};

/// Exact marginal onto `keep` (a nonempty subset of g's block).
GaussianJoint marginalize(const GaussianJoint& g, LabelSet keep);

/// Closed-form KL(a || b). Requires equal blocks and dimensions.
double gaussian_kld(const GaussianJoint& a, const GaussianJoint& b);

/// Cross entropy -E_a[log b]; requires equal dimensions (blocks may differ).
double gaussian_cross_entropy(const GaussianJoint& a, const GaussianJoint& b);

/// Symmetrizes `m`, then clamps its eigenvalues from below at `floor`.
/// Throws DomainError if floor <= 0 or m is not square.
Eigen::MatrixXd nearest_pd(const Eigen::MatrixXd& m, double floor);

/// floor_ratio times the largest eigenvalue of the symmetrized matrix.
double default_pd_floor(const Eigen::MatrixXd& m, double floor_ratio = kDefaultPdFloorRatio);

/// Weighted sum of single-label Gaussians on the single-object space.
/// Weights are nonnegative but need not sum to one.
class GaussianMixture {
public:
    struct Component {
        double weight;
        GaussianJoint density;
    };

    explicit GaussianMixture(std::size_t state_dim = 1) : state_dim_(state_dim) {}

    /// Appends a component. Throws DomainError if the component spans more
    /// than one label or its dimension differs, ValidationError if w < 0.
    void add(double weight, GaussianJoint density);
    void append(const GaussianMixture& other);

    [[nodiscard]] std::size_t state_dim() const { return state_dim_; }
    [[nodiscard]] const std::vector<Component>& components() const { return components_; }
    [[nodiscard]] std::size_t size() const { return components_.size(); }
    [[nodiscard]] bool empty() const { return components_.empty(); }

    [[nodiscard]] double evaluate(std::span<const double> x) const;
    /// log of evaluate(), computed with log-sum-exp; -inf for an empty mixture.
    [[nodiscard]] double log_evaluate(std::span<const double> x) const;
    [[nodiscard]] double integral() const;
    [[nodiscard]] GaussianMixture scaled(double factor) const;

    /// Per-coordinate [lo, hi] covering every component mean +- width*sigma.
    [[nodiscard]] std::vector<std::pair<double, double>> bounding_box(double width) const;

private:
    std::size_t state_dim_;
    std::vector<Component> components_;
};

double mixture_evaluate(const GaussianMixture& mix, std::span<const double> x);
double mixture_integral(const GaussianMixture& mix);

}  // namespace lmoapprox
