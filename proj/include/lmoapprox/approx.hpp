#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lmoapprox/density.hpp"
#include "lmoapprox/gaussian.hpp"
#include "lmoapprox/labelspace.hpp"
#include "lmoapprox/lmo.hpp"

namespace lmoapprox {

/// delta-GLMB density: one hypothesis per label set I with weight w(I)
/// and independent per-label single-object densities p^(I)(x, l).
class DeltaGLMBDensity : public FactorizedDensity {
public:
    /// `factors[mask]` holds one unit-mass Gaussian per member of the
    /// label set (canonical order); it must be filled exactly for the
    /// nonempty label sets of positive weight.
    DeltaGLMBDensity(LabelSpace space, std::size_t state_dim, WeightTable weights,
                     std::vector<std::vector<GaussianJoint>> factors);

    [[nodiscard]] const LabelSpace& space() const override { return space_; }
    [[nodiscard]] std::size_t state_dim() const override { return state_dim_; }
    [[nodiscard]] const WeightTable& weights() const { return weights_; }
    [[nodiscard]] double weight(LabelSet I) const override;
    [[nodiscard]] const GaussianMixture& factor(LabelSet I, Label l) const override;

    /// p^(I)(., l) as a Gaussian.
    [[nodiscard]] const GaussianJoint& spatial(LabelSet I, Label l) const;

    [[nodiscard]] CardinalityDistribution cardinality() const;
    /// sum_I 1_I(l) w(I) p^(I)(x, l) from this density's own hypotheses.
    [[nodiscard]] GaussianMixture labeled_phd(Label l) const;

    /// The same density viewed as an LMO density whose joint conditionals
    /// are block-diagonal products of the per-label factors.
    [[nodiscard]] LMODensity as_lmo() const;

private:
    LabelSpace space_;
    std::size_t state_dim_;
    WeightTable weights_;
    std::vector<std::vector<GaussianMixture>> factors_;  // by mask, then member position
};

/// Keeps w(I) and replaces each conditional with the product of its
/// single-label marginals.
DeltaGLMBDensity approx_delta_glmb(const LMODensity& pi);

/// Labeled multi-Bernoulli track: existence probability and spatial density.
struct Track {
    double r = 0.0;
    GaussianMixture p;
};

/// LMB density with independent tracks. The label-set weight is
/// prod_{l in I} r_l prod_{l not in I} (1 - r_l).
class LMBDensity : public FactorizedDensity {
public:
    /// One track per label of `space`, index order. Throws ValidationError
    /// unless 0 <= r <= 1 and each p with r > 0 has unit mass (+-1e-9).
    LMBDensity(LabelSpace space, std::size_t state_dim, std::vector<Track> tracks);

    [[nodiscard]] const LabelSpace& space() const override { return space_; }
    [[nodiscard]] std::size_t state_dim() const override { return state_dim_; }
    [[nodiscard]] const std::vector<Track>& tracks() const { return tracks_; }
    [[nodiscard]] const Track& track(Label l) const;
    [[nodiscard]] double weight(LabelSet I) const override;
    [[nodiscard]] const GaussianMixture& factor(LabelSet I, Label l) const override;

private:
    LabelSpace space_;
    std::size_t state_dim_;
    std::vector<Track> tracks_;
};

/// r(l) = sum_{I contains l} w(I); p(l) = labeled PHD / r(l). Labels with
/// r(l) = 0 keep a track with r = 0 and an empty mixture.
LMBDensity approx_lmb(const LMODensity& pi);

/// Cardinality of an LMB by sequential convolution of the per-track
/// Bernoulli distributions (valid for r = 1 as well).
CardinalityDistribution lmb_cardinality(const LMBDensity& m);

/// v(x, l) = r(l) p(l)(x).
GaussianMixture lmb_labeled_phd(const LMBDensity& m, Label l);

/// Labeled i.i.d. cluster process: L(X) must equal the canonical prefix
/// L(|X|); cardinality rho; every object drawn from `spatial`.
class LIIDDensity : public FactorizedDensity {
public:
    /// Throws ValidationError unless rho is finite and normalized and the
    /// spatial mixture has unit mass (an empty mixture is allowed only
    /// when rho puts all mass on n = 0).
    LIIDDensity(LabelSpace space, std::size_t state_dim, CardinalityDistribution rho, GaussianMixture spatial,
                double vbar);

    [[nodiscard]] const LabelSpace& space() const override { return space_; }
    [[nodiscard]] std::size_t state_dim() const override { return state_dim_; }
    [[nodiscard]] const CardinalityDistribution& rho() const { return rho_; }
    [[nodiscard]] const GaussianMixture& spatial() const { return spatial_; }
    /// <v, 1> of the PHD the spatial density was normalized from.
    [[nodiscard]] double vbar() const { return vbar_; }
    [[nodiscard]] bool degenerate() const { return spatial_.empty(); }
    [[nodiscard]] double weight(LabelSet I) const override;
    [[nodiscard]] const GaussianMixture& factor(LabelSet I, Label l) const override;

private:
    LabelSpace space_;
    std::size_t state_dim_;
    CardinalityDistribution rho_;
    GaussianMixture spatial_;
    double vbar_;
};

/// rho = cardinality of pi; spatial = v / <v, 1>. For pi concentrated on
/// the empty set the result is degenerate (empty spatial mixture).
LIIDDensity approx_liid(const LMODensity& pi);

/// Labeled Poisson process: like LIID with a Poisson(rate) cardinality.
/// On a finite label space the label-set weights only carry the Poisson
/// mass of n <= |L|.
class LPDensity : public FactorizedDensity {
public:
    /// Throws DomainError unless rate > 0; ValidationError unless spatial
    /// has unit mass.
    LPDensity(LabelSpace space, std::size_t state_dim, double rate, GaussianMixture spatial);

    [[nodiscard]] const LabelSpace& space() const override { return space_; }
    [[nodiscard]] std::size_t state_dim() const override { return state_dim_; }
    [[nodiscard]] double rate() const { return rate_; }
    [[nodiscard]] const GaussianMixture& spatial() const { return spatial_; }
    [[nodiscard]] CardinalityDistribution cardinality() const;
    [[nodiscard]] double weight(LabelSet I) const override;
    [[nodiscard]] const GaussianMixture& factor(LabelSet I, Label l) const override;

private:
    LabelSpace space_;
    std::size_t state_dim_;
    double rate_;
    GaussianMixture spatial_;
};

/// rate = <v, 1>, spatial = v / rate. Throws DomainError if <v, 1> = 0.
LPDensity approx_lp(const LMODensity& pi);

/// alpha(l) = sum_{n >= k} rho(n), k the canonical index of l.
double liid_alpha(const LIIDDensity& m, Label l);
/// alpha(l) = sum_{n >= k} Pois_rate(n) over the truncated Poisson range.
double lp_alpha(const LPDensity& m, Label l);

/// v(x, l) = alpha(l) spatial(x).
GaussianMixture liid_labeled_phd(const LIIDDensity& m, Label l);
GaussianMixture lp_labeled_phd(const LPDensity& m, Label l);

/// Unlabeled PHD: sum of the labeled PHDs for LIID; the Poisson intensity
/// rate * spatial for LP.
GaussianMixture liid_unlabeled_phd(const LIIDDensity& m);
GaussianMixture lp_unlabeled_phd(const LPDensity& m);

enum class DensityKind { lmo, delta_glmb, lmb, lp, liid };

std::string to_string(DensityKind kind);

/// Number of Euclidean integrals a set integral of the density needs,
/// grouped by the power X^k they are taken over.
struct CostProfile {
    DensityKind kind;
    std::size_t n_labels;
    std::vector<std::uint64_t> integrals;  // integrals[k - 1] on X^k, k = 1..n_labels

    [[nodiscard]] std::uint64_t on_power(std::size_t k) const { return integrals.at(k - 1); }
    [[nodiscard]] std::uint64_t total() const;
};

/// LMO: C(n, k) on X^k; delta-GLMB: sum_k k C(n, k) on X; LMB: n on X;
/// LP and LIID: 1 on X. Throws DomainError if n_labels is 0 or > 20.
CostProfile integral_cost(DensityKind kind, std::size_t n_labels);

}  // namespace lmoapprox
