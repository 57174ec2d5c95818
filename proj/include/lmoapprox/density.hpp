#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lmoapprox/gaussian.hpp"
#include "lmoapprox/labelspace.hpp"

namespace lmoapprox {

/// A finite labeled multi-object state {(x_1, l_1), ..., (x_n, l_n)} with
/// distinct labels.
class LabeledState {
public:
    LabeledState() = default;
    /// Throws DomainError on duplicate labels or mixed state dimensions.
    explicit LabeledState(std::vector<std::pair<Label, Eigen::VectorXd>> pairs);

    [[nodiscard]] std::size_t size() const { return pairs_.size(); }
    [[nodiscard]] bool empty() const { return pairs_.empty(); }
    [[nodiscard]] LabelSet labels() const { return labels_; }
    /// States stacked in canonical label order.
    [[nodiscard]] std::vector<double> stacked() const;
    [[nodiscard]] std::size_t state_dim() const;

private:
    std::vector<std::pair<Label, Eigen::VectorXd>> pairs_;  // canonical order
    LabelSet labels_;
};

using Box = std::vector<std::pair<double, double>>;

/// A labeled multi-object density that can be evaluated stratum by
/// stratum: for a label set I, the restriction is an ordinary density on
/// R^{|I| d} with coordinates stacked in canonical label order.
class LabeledDensity {
public:
    virtual ~LabeledDensity() = default;

    [[nodiscard]] virtual const LabelSpace& space() const = 0;
    [[nodiscard]] virtual std::size_t state_dim() const = 0;

    /// Total mass of stratum I (the label-set weight).
    [[nodiscard]] virtual double stratum_mass(LabelSet I) const = 0;

    /// log pi({(x_i, l_i)}) for L(X) = I; -inf where the density vanishes.
    [[nodiscard]] virtual double log_density(LabelSet I, std::span<const double> x) const = 0;

    /// Per-coordinate box holding the stratum's mass to within `width`
    /// standard deviations. Empty for I = {} or for massless strata.
    [[nodiscard]] virtual Box support_box(LabelSet I, double width) const = 0;

    /// Density value at a labeled state. Throws DomainError if a label is
    /// outside the space or the state dimension is wrong.
    [[nodiscard]] double density_at(const LabeledState& X) const;
};

/// A labeled density of the form w(L(X)) prod_{(x,l) in X} q_{L(X)}(x, l),
/// i.e. a label-set weight times a per-label product of single-object
/// mixtures. All four approximation families have this form.
class FactorizedDensity : public LabeledDensity {
public:
    /// Label-set weight w(I).
    [[nodiscard]] virtual double weight(LabelSet I) const = 0;
    /// Unit-mass single-object factor of label l in stratum I. Throws
    /// DomainError if l is not in I or the factor is undefined.
    [[nodiscard]] virtual const GaussianMixture& factor(LabelSet I, Label l) const = 0;

    [[nodiscard]] double stratum_mass(LabelSet I) const override { return weight(I); }
    [[nodiscard]] double log_density(LabelSet I, std::span<const double> x) const override;
    [[nodiscard]] Box support_box(LabelSet I, double width) const override;
};

}  // namespace lmoapprox
