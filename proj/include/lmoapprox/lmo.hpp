#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lmoapprox/density.hpp"
#include "lmoapprox/gaussian.hpp"
#include "lmoapprox/labelspace.hpp"

namespace lmoapprox {

/// Unvalidated mean and covariance of one label-set conditional.
struct RawConditional {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

/// Unvalidated LMO density parameters: label-set weights plus one joint
/// Gaussian per label set. This is what a spec document decodes into.
struct LmoParameters {
    LabelSpace space;
    std::size_t state_dim = 1;
    std::vector<double> weights;                         // dense, indexed by subset mask
    std::map<std::uint32_t, RawConditional> conditionals;  // keyed by subset mask
};

struct Violation {
    enum class Kind {
        bad_space,
        negative_weight,
        normalization,
        missing_conditional,
        shape_mismatch,
        asymmetric_covariance,
        non_pd_covariance,
    };
    Kind kind;
    LabelSet subset;  // empty for table-wide violations
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    [[nodiscard]] bool ok() const { return violations.empty(); }
    [[nodiscard]] std::string format() const;
};

/// Lists every violation of the LMO invariants: normalized nonnegative
/// weights, and a symmetric PD conditional with matching shape for each
/// nonempty label set of positive weight.
ValidationReport validate(const LmoParameters& params);

struct PdRepair {
    LabelSet subset;
    double min_eigenvalue_before;
    double floor;
    double frobenius_change;
};

/// Replaces each non-PD conditional covariance with nearest_pd(cov,
/// floor_ratio * max eigenvalue) and returns one record per repair.
std::vector<PdRepair> repair_covariances(LmoParameters& params, double floor_ratio = kDefaultPdFloorRatio);

/// Labeled multi-object density pi(X) = w(L(X)) P(X) with one Gaussian
/// conditional per label set of positive weight. Immutable.
class LMODensity : public LabeledDensity {
public:
    /// Throws ValidationError (carrying the formatted report) if
    /// validate(params) is not clean. Conditionals of zero-weight label
    /// sets are dropped.
    explicit LMODensity(const LmoParameters& params);

    [[nodiscard]] const LabelSpace& space() const override { return space_; }
    [[nodiscard]] std::size_t state_dim() const override { return state_dim_; }
    [[nodiscard]] const WeightTable& weights() const { return weights_; }

    /// Conditional of label set I; nullptr when w(I) = 0 or I is empty.
    [[nodiscard]] const GaussianJoint* conditional(LabelSet I) const;

    /// Label sets with positive weight, canonical order (may include {}).
    [[nodiscard]] std::vector<LabelSet> support() const;

    [[nodiscard]] double stratum_mass(LabelSet I) const override;
    [[nodiscard]] double log_density(LabelSet I, std::span<const double> x) const override;
    [[nodiscard]] Box support_box(LabelSet I, double width) const override;

    /// Parameters that reconstruct this density exactly.
    [[nodiscard]] LmoParameters parameters() const;

private:
    LabelSpace space_;
    std::size_t state_dim_;
    WeightTable weights_;
    std::vector<std::optional<GaussianJoint>> conditionals_;  // by mask
};

/// Report for an already-constructed density (always clean; kept so
/// callers can validate either representation uniformly).
ValidationReport validate(const LMODensity& density);

/// p_{I - {l}}(x, l): the marginal of P restricted to I onto label l.
/// Throws DomainError if l is not in I or w(I) = 0.
GaussianJoint conditional_marginal(const LMODensity& pi, LabelSet I, Label l);

/// v(x, l) = sum_{I contains l} w(I) p_{I-{l}}(x, l); one component per I
/// of positive weight, in canonical subset order.
GaussianMixture labeled_phd(const LMODensity& pi, Label l);

/// v(x) = sum over labels of v(x, l), concatenated label by label.
GaussianMixture unlabeled_phd(const LMODensity& pi);

}  // namespace lmoapprox
