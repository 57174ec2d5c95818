#include "lmoapprox/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lmoapprox/errors.hpp"

namespace lmoapprox {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> x) {
    return {x.data(), static_cast<Eigen::Index>(x.size())};
}

}  // namespace

CovarianceDiagnostics diagnose_covariance(const Eigen::MatrixXd& cov) {
    CovarianceDiagnostics d;
    if (cov.rows() != cov.cols() || cov.rows() == 0) {
        d.square = false;
        d.min_eigenvalue = -std::numeric_limits<double>::infinity();
        return d;
    }
    if (!cov.allFinite()) {
        d.finite = false;
        d.min_eigenvalue = -std::numeric_limits<double>::infinity();
        return d;
    }
    d.asymmetry = (cov - cov.transpose()).cwiseAbs().maxCoeff();
    const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = es.eigenvalues().minCoeff();
    d.max_eigenvalue = es.eigenvalues().maxCoeff();
    return d;
}

GaussianJoint::GaussianJoint(LabelSet block, std::size_t state_dim, Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : block_(block), state_dim_(state_dim), mean_(std::move(mean)) {
    if (state_dim_ == 0) throw DomainError("state dimension must be positive");
    if (block_.empty()) throw DomainError("Gaussian block must be nonempty");
    const auto n = static_cast<Eigen::Index>(block_.size() * state_dim_);
    if (mean_.size() != n) throw DomainError("mean length does not match block size times state dimension");
    if (cov.rows() != n || cov.cols() != n) throw DomainError("covariance shape does not match mean length");
    if (!mean_.allFinite()) throw ValidationError("mean has non-finite entries");
    const auto diag = diagnose_covariance(cov);
    if (!diag.finite) throw ValidationError("covariance has non-finite entries");
    if (!diag.symmetric()) throw ValidationError("covariance is not symmetric");
    if (!diag.positive_definite()) throw ValidationError("covariance is not positive definite");
    cov_ = 0.5 * (cov + cov.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(cov_);
    if (llt.info() != Eigen::Success) throw ValidationError("covariance Cholesky factorization failed");
    chol_ = llt.matrixL();
    log_det_ = 2.0 * chol_.diagonal().array().log().sum();
}

GaussianJoint GaussianJoint::scalar(double mean, double variance) {
    return GaussianJoint(LabelSet::of({1}), 1, Eigen::VectorXd::Constant(1, mean),
                         Eigen::MatrixXd::Constant(1, 1, variance));
}

double GaussianJoint::log_evaluate(std::span<const double> x) const {
    if (x.size() != dim()) throw DomainError("evaluation point has wrong dimension");
    if (x.size() == 1) {
        const double z = (x[0] - mean_[0]) / chol_(0, 0);
        return -0.5 * (kLog2Pi + log_det_ + z * z);
    }
    const Eigen::VectorXd r = as_vector(x) - mean_;
    const Eigen::VectorXd z = chol_.triangularView<Eigen::Lower>().solve(r);
    return -0.5 * (static_cast<double>(dim()) * kLog2Pi + log_det_ + z.squaredNorm());
}

double GaussianJoint::evaluate(std::span<const double> x) const { return std::exp(log_evaluate(x)); }

double GaussianJoint::entropy() const {
    return 0.5 * (static_cast<double>(dim()) * (kLog2Pi + 1.0) + log_det_);
}

Eigen::VectorXd GaussianJoint::sample(std::mt19937_64& rng) const {
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(mean_.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
    return mean_ + chol_ * z;
}

GaussianJoint GaussianJoint::relabel(LabelSet block) const {
    if (block.size() != block_.size()) throw DomainError("relabel target has a different size");
    GaussianJoint g = *this;
    g.block_ = block;
    return g;
}

GaussianJoint marginalize(const GaussianJoint& g, LabelSet keep) {
    if (keep.empty()) throw DomainError("marginalization target is empty");
    if (!keep.subset_of(g.block())) throw DomainError("marginalization target is not a subset of the block");
    if (keep == g.block()) return g;
    const std::size_t d = g.state_dim();
    std::vector<Eigen::Index> idx;
    for (Label l : keep.members()) {
        const std::size_t pos = g.block().position_of(l);
        for (std::size_t k = 0; k < d; ++k) idx.push_back(static_cast<Eigen::Index>(pos * d + k));
    }
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::VectorXd mean(n);
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        mean[i] = g.mean()[idx[i]];
        for (Eigen::Index j = 0; j < n; ++j) cov(i, j) = g.cov()(idx[i], idx[j]);
    }
    return GaussianJoint(keep, d, std::move(mean), std::move(cov));
}

double gaussian_cross_entropy(const GaussianJoint& a, const GaussianJoint& b) {
    if (a.dim() != b.dim()) throw DomainError("cross entropy of Gaussians with different dimensions");
    const auto lb = b.chol().triangularView<Eigen::Lower>();
    // tr(Sb^-1 Sa) = ||Lb^-1 La||_F^2
    const Eigen::MatrixXd m = lb.solve(a.chol());
    const Eigen::VectorXd dm = lb.solve(b.mean() - a.mean());
    return 0.5 * (static_cast<double>(b.dim()) * kLog2Pi + b.log_det() + m.squaredNorm() + dm.squaredNorm());
}

double gaussian_kld(const GaussianJoint& a, const GaussianJoint& b) {
    if (a.dim() != b.dim() || a.block() != b.block()) {
        throw DomainError("KLD between Gaussians over different blocks");
    }
    const auto lb = b.chol().triangularView<Eigen::Lower>();
    const Eigen::MatrixXd m = lb.solve(a.chol());
    const Eigen::VectorXd dm = lb.solve(b.mean() - a.mean());
    const double k = static_cast<double>(a.dim());
    const double value = 0.5 * (m.squaredNorm() + dm.squaredNorm() - k + b.log_det() - a.log_det());
    return std::max(0.0, value);
}

Eigen::MatrixXd nearest_pd(const Eigen::MatrixXd& m, double floor) {
    if (!(floor > 0.0)) throw DomainError("nearest_pd floor must be positive");
    if (m.rows() != m.cols() || m.rows() == 0) throw DomainError("nearest_pd needs a square matrix");
    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.eigenvalues().minCoeff() >= floor) return sym;
    const Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(floor);
    Eigen::MatrixXd out = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (out + out.transpose());
}

double default_pd_floor(const Eigen::MatrixXd& m, double floor_ratio) {
    if (m.rows() != m.cols() || m.rows() == 0) throw DomainError("default_pd_floor needs a square matrix");
    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    return floor_ratio * es.eigenvalues().maxCoeff();
}

void GaussianMixture::add(double weight, GaussianJoint density) {
    if (!(weight >= 0.0) || !std::isfinite(weight)) throw ValidationError("mixture weight must be nonnegative");
    if (density.block().size() != 1) throw DomainError("mixture components must span a single label");
    if (density.state_dim() != state_dim_) throw DomainError("mixture component has the wrong state dimension");
    components_.push_back({weight, std::move(density)});
}

void GaussianMixture::append(const GaussianMixture& other) {
    if (other.state_dim_ != state_dim_) throw DomainError("cannot append mixtures of different dimension");
    components_.insert(components_.end(), other.components_.begin(), other.components_.end());
}

double GaussianMixture::evaluate(std::span<const double> x) const {
    if (x.size() != state_dim_) throw DomainError("evaluation point has wrong dimension");
    double sum = 0.0;
    for (const auto& c : components_) sum += c.weight * c.density.evaluate(x);
    return sum;
}

double GaussianMixture::log_evaluate(std::span<const double> x) const {
    if (x.size() != state_dim_) throw DomainError("evaluation point has wrong dimension");
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    // Streaming log-sum-exp.
    double peak = kNegInf;
    double scaled_sum = 0.0;
    for (const auto& c : components_) {
        if (c.weight <= 0.0) continue;
        const double t = std::log(c.weight) + c.density.log_evaluate(x);
        if (t == kNegInf) continue;
        if (t > peak) {
            scaled_sum = scaled_sum * std::exp(peak - t) + 1.0;
            peak = t;
        } else {
            scaled_sum += std::exp(t - peak);
        }
    }
    if (peak == kNegInf) return kNegInf;
    return peak + std::log(scaled_sum);
}

double GaussianMixture::integral() const {
    double s = 0.0;
    for (const auto& c : components_) s += c.weight;
    return s;
}

GaussianMixture GaussianMixture::scaled(double factor) const {
    if (!(factor >= 0.0) || !std::isfinite(factor)) throw ValidationError("mixture scale factor must be nonnegative");
    GaussianMixture out = *this;
    for (auto& c : out.components_) c.weight *= factor;
    return out;
}

std::vector<std::pair<double, double>> GaussianMixture::bounding_box(double width) const {
    std::vector<std::pair<double, double>> box(state_dim_,
                                               {std::numeric_limits<double>::infinity(),
                                                -std::numeric_limits<double>::infinity()});
    for (const auto& c : components_) {
        for (std::size_t k = 0; k < state_dim_; ++k) {
            const auto i = static_cast<Eigen::Index>(k);
            const double sd = std::sqrt(c.density.cov()(i, i));
            box[k].first = std::min(box[k].first, c.density.mean()[i] - width * sd);
            box[k].second = std::max(box[k].second, c.density.mean()[i] + width * sd);
        }
    }
    return box;
}

double mixture_evaluate(const GaussianMixture& mix, std::span<const double> x) { return mix.evaluate(x); }

double mixture_integral(const GaussianMixture& mix) { return mix.integral(); }

}  // namespace lmoapprox
