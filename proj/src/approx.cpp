#include "lmoapprox/approx.hpp"

#include <cmath>
#include <numeric>

#include "lmoapprox/errors.hpp"

namespace lmoapprox {

namespace {

void require_unit_mass(const GaussianMixture& p, const char* what) {
    if (std::abs(p.integral() - 1.0) > kNormalizationTol) {
        throw ValidationError(std::string(what) + " must have unit mass");
    }
}

void require_member(LabelSet I, Label l) {
    if (!I.contains(l)) throw DomainError("label " + std::to_string(l.index) + " is not in the label set");
}

void require_label(const LabelSpace& space, Label l) {
    if (!space.contains(l)) throw DomainError("label " + std::to_string(l.index) + " not in space");
}

// Weight of an LIID/LP label set: nonzero only on canonical prefixes.
bool is_canonical_prefix(const LabelSpace& space, LabelSet I) {
    return I.subset_of(space.full_set()) && I == canonical_prefix(space, I.size());
}

}  // namespace

// ---- delta-GLMB --------------------------------------------------------

DeltaGLMBDensity::DeltaGLMBDensity(LabelSpace space, std::size_t state_dim, WeightTable weights,
                                   std::vector<std::vector<GaussianJoint>> factors)
    : space_(std::move(space)), state_dim_(state_dim), weights_(std::move(weights)) {
    if (weights_.n_labels() != space_.size()) throw ValidationError("weight table does not match the label space");
    if (factors.size() != space_.subset_count()) throw ValidationError("need one factor list per label set");
    factors_.resize(factors.size());
    for (std::uint32_t m = 1; m < factors.size(); ++m) {
        const LabelSet I(m);
        if (!(weights_.at(I) > 0.0)) {
            if (!factors[m].empty()) throw ValidationError("zero-weight hypothesis must not carry factors");
            continue;
        }
        const auto members = I.members();
        if (factors[m].size() != members.size()) {
            throw ValidationError("hypothesis " + space_.format(I) + " needs one factor per label");
        }
        for (std::size_t i = 0; i < members.size(); ++i) {
            const auto& g = factors[m][i];
            if (g.block() != LabelSet().with(members[i]) || g.state_dim() != state_dim_) {
                throw ValidationError("factor block does not match its label in " + space_.format(I));
            }
            GaussianMixture mix(state_dim_);
            mix.add(1.0, g);
            factors_[m].push_back(std::move(mix));
        }
    }
}

double DeltaGLMBDensity::weight(LabelSet I) const {
    if (!I.subset_of(space_.full_set())) throw DomainError("label set outside the space");
    return weights_.at(I);
}

const GaussianMixture& DeltaGLMBDensity::factor(LabelSet I, Label l) const {
    require_member(I, l);
    if (!I.subset_of(space_.full_set()) || factors_[I.mask()].empty()) {
        throw DomainError("hypothesis " + space_.format(I) + " has zero weight");
    }
    return factors_[I.mask()][I.position_of(l)];
}

const GaussianJoint& DeltaGLMBDensity::spatial(LabelSet I, Label l) const {
    return factor(I, l).components().front().density;
}

CardinalityDistribution DeltaGLMBDensity::cardinality() const { return cardinality_from_weights(weights_); }

GaussianMixture DeltaGLMBDensity::labeled_phd(Label l) const {
    require_label(space_, l);
    GaussianMixture mix(state_dim_);
    for (std::uint32_t m = 1; m < factors_.size(); ++m) {
        const LabelSet I(m);
        if (!I.contains(l) || factors_[m].empty()) continue;
        mix.add(weights_.at(I), spatial(I, l));
    }
    return mix;
}

LMODensity DeltaGLMBDensity::as_lmo() const {
    LmoParameters p;
    p.space = space_;
    p.state_dim = state_dim_;
    p.weights = weights_.dense();
    const auto d = static_cast<Eigen::Index>(state_dim_);
    for (std::uint32_t m = 1; m < factors_.size(); ++m) {
        if (factors_[m].empty()) continue;
        const auto n = static_cast<Eigen::Index>(factors_[m].size()) * d;
        RawConditional c{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
        for (std::size_t i = 0; i < factors_[m].size(); ++i) {
            const auto& g = factors_[m][i].components().front().density;
            const auto off = static_cast<Eigen::Index>(i) * d;
            c.mean.segment(off, d) = g.mean();
            c.cov.block(off, off, d, d) = g.cov();
        }
        p.conditionals[m] = std::move(c);
    }
    return LMODensity(p);
}

DeltaGLMBDensity approx_delta_glmb(const LMODensity& pi) {
    std::vector<std::vector<GaussianJoint>> factors(pi.space().subset_count());
    for (LabelSet I : pi.support()) {
        if (I.empty()) continue;
        for (Label l : I.members()) factors[I.mask()].push_back(conditional_marginal(pi, I, l));
    }
    return DeltaGLMBDensity(pi.space(), pi.state_dim(), pi.weights(), std::move(factors));
}

// ---- LMB ---------------------------------------------------------------

LMBDensity::LMBDensity(LabelSpace space, std::size_t state_dim, std::vector<Track> tracks)
    : space_(std::move(space)), state_dim_(state_dim), tracks_(std::move(tracks)) {
    if (tracks_.size() != space_.size()) throw ValidationError("LMB needs one track per label");
    for (const auto& t : tracks_) {
        if (!(t.r >= 0.0 && t.r <= 1.0)) throw ValidationError("existence probability outside [0, 1]");
        if (t.p.state_dim() != state_dim_) throw ValidationError("track density has the wrong state dimension");
        if (t.r > 0.0) require_unit_mass(t.p, "track spatial density");
    }
}

const Track& LMBDensity::track(Label l) const {
    require_label(space_, l);
    return tracks_[l.index - 1];
}

double LMBDensity::weight(LabelSet I) const {
    if (!I.subset_of(space_.full_set())) throw DomainError("label set outside the space");
    double w = 1.0;
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        const double r = tracks_[i].r;
        w *= I.contains(Label{i + 1}) ? r : 1.0 - r;
    }
    return w;
}

const GaussianMixture& LMBDensity::factor(LabelSet I, Label l) const {
    require_member(I, l);
    return track(l).p;
}

LMBDensity approx_lmb(const LMODensity& pi) {
    std::vector<Track> tracks;
    for (Label l : pi.space().labels()) {
        // Ascending mask order, so r is reproducible bit for bit.
        double r = 0.0;
        const auto& w = pi.weights().dense();
        for (std::uint32_t m = 0; m < w.size(); ++m) {
            if (LabelSet(m).contains(l)) r += w[m];
        }
        Track t{r, GaussianMixture(pi.state_dim())};
        if (r > 0.0) t.p = labeled_phd(pi, l).scaled(1.0 / r);
        tracks.push_back(std::move(t));
    }
    return LMBDensity(pi.space(), pi.state_dim(), std::move(tracks));
}

CardinalityDistribution lmb_cardinality(const LMBDensity& m) {
    std::vector<double> probs{1.0};
    for (const auto& t : m.tracks()) {
        std::vector<double> next(probs.size() + 1, 0.0);
        for (std::size_t n = 0; n < probs.size(); ++n) {
            next[n] += probs[n] * (1.0 - t.r);
            next[n + 1] += probs[n] * t.r;
        }
        probs = std::move(next);
    }
    return CardinalityDistribution::finite(std::move(probs));
}

GaussianMixture lmb_labeled_phd(const LMBDensity& m, Label l) {
    const auto& t = m.track(l);
    if (t.r == 0.0) return GaussianMixture(m.state_dim());
    return t.p.scaled(t.r);
}

// ---- LIID --------------------------------------------------------------

LIIDDensity::LIIDDensity(LabelSpace space, std::size_t state_dim, CardinalityDistribution rho,
                         GaussianMixture spatial, double vbar)
    : space_(std::move(space)),
      state_dim_(state_dim),
      rho_(std::move(rho)),
      spatial_(std::move(spatial)),
      vbar_(vbar) {
    if (rho_.kind() != CardinalityDistribution::Kind::finite) throw ValidationError("LIID cardinality must be finite");
    if (rho_.n_max() > space_.size()) throw ValidationError("LIID cardinality exceeds the label space size");
    if (spatial_.state_dim() != state_dim_) throw ValidationError("spatial density has the wrong state dimension");
    if (spatial_.empty()) {
        if (std::abs(rho_[0] - 1.0) > kNormalizationTol) {
            throw ValidationError("empty spatial density requires all cardinality mass at n = 0");
        }
    } else {
        require_unit_mass(spatial_, "LIID spatial density");
    }
}

double LIIDDensity::weight(LabelSet I) const {
    if (!I.subset_of(space_.full_set())) throw DomainError("label set outside the space");
    return is_canonical_prefix(space_, I) ? rho_[I.size()] : 0.0;
}

const GaussianMixture& LIIDDensity::factor(LabelSet I, Label l) const {
    require_member(I, l);
    require_label(space_, l);
    return spatial_;
}

LIIDDensity approx_liid(const LMODensity& pi) {
    auto rho = cardinality_from_weights(pi.weights());
    const auto v = unlabeled_phd(pi);
    const double vbar = v.integral();
    if (!(vbar > 0.0)) return LIIDDensity(pi.space(), pi.state_dim(), std::move(rho), GaussianMixture(pi.state_dim()), 0.0);
    return LIIDDensity(pi.space(), pi.state_dim(), std::move(rho), v.scaled(1.0 / vbar), vbar);
}

// ---- LP ----------------------------------------------------------------

LPDensity::LPDensity(LabelSpace space, std::size_t state_dim, double rate, GaussianMixture spatial)
    : space_(std::move(space)), state_dim_(state_dim), rate_(rate), spatial_(std::move(spatial)) {
    if (!(rate_ > 0.0) || !std::isfinite(rate_)) throw DomainError("labeled Poisson rate must be positive");
    if (spatial_.state_dim() != state_dim_) throw ValidationError("spatial density has the wrong state dimension");
    require_unit_mass(spatial_, "LP spatial density");
}

CardinalityDistribution LPDensity::cardinality() const { return CardinalityDistribution::poisson(rate_); }

double LPDensity::weight(LabelSet I) const {
    if (!I.subset_of(space_.full_set())) throw DomainError("label set outside the space");
    return is_canonical_prefix(space_, I) ? poisson_pmf(rate_, I.size()) : 0.0;
}

const GaussianMixture& LPDensity::factor(LabelSet I, Label l) const {
    require_member(I, l);
    require_label(space_, l);
    return spatial_;
}

LPDensity approx_lp(const LMODensity& pi) {
    const auto v = unlabeled_phd(pi);
    const double rate = v.integral();
    if (!(rate > 0.0)) throw DomainError("labeled Poisson approximation needs a positive expected cardinality");
    return LPDensity(pi.space(), pi.state_dim(), rate, v.scaled(1.0 / rate));
}

double liid_alpha(const LIIDDensity& m, Label l) {
    require_label(m.space(), l);
    return m.rho().tail(l.index);
}

double lp_alpha(const LPDensity& m, Label l) {
    require_label(m.space(), l);
    return m.cardinality().tail(l.index);
}

GaussianMixture liid_labeled_phd(const LIIDDensity& m, Label l) { return m.spatial().scaled(liid_alpha(m, l)); }

GaussianMixture lp_labeled_phd(const LPDensity& m, Label l) { return m.spatial().scaled(lp_alpha(m, l)); }

GaussianMixture liid_unlabeled_phd(const LIIDDensity& m) {
    GaussianMixture out(m.state_dim());
    for (Label l : m.space().labels()) out.append(liid_labeled_phd(m, l));
    return out;
}

GaussianMixture lp_unlabeled_phd(const LPDensity& m) { return m.spatial().scaled(m.rate()); }

// ---- cost model --------------------------------------------------------

std::string to_string(DensityKind kind) {
    switch (kind) {
        case DensityKind::lmo: return "LMO";
        case DensityKind::delta_glmb: return "delta-GLMB";
        case DensityKind::lmb: return "LMB";
        case DensityKind::lp: return "LP";
        case DensityKind::liid: return "LIID";
    }
    return "unknown";
}

std::uint64_t CostProfile::total() const { return std::accumulate(integrals.begin(), integrals.end(), std::uint64_t{0}); }

CostProfile integral_cost(DensityKind kind, std::size_t n_labels) {
    if (n_labels < 1 || n_labels > kMaxLabels) throw DomainError("label count must be in [1, 20]");
    CostProfile c{kind, n_labels, std::vector<std::uint64_t>(n_labels, 0)};
    std::vector<std::uint64_t> binom(n_labels + 1, 0);
    binom[0] = 1;
    for (std::size_t k = 1; k <= n_labels; ++k) binom[k] = binom[k - 1] * (n_labels - k + 1) / k;
    switch (kind) {
        case DensityKind::lmo:
            for (std::size_t k = 1; k <= n_labels; ++k) c.integrals[k - 1] = binom[k];
            break;
        case DensityKind::delta_glmb:
            for (std::size_t k = 1; k <= n_labels; ++k) c.integrals[0] += k * binom[k];
            break;
        case DensityKind::lmb:
            c.integrals[0] = n_labels;
            break;
        case DensityKind::lp:
        case DensityKind::liid:
            c.integrals[0] = 1;
            break;
    }
    return c;
}

}  // namespace lmoapprox
