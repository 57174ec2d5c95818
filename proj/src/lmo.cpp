#include "lmoapprox/lmo.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "lmoapprox/errors.hpp"

namespace lmoapprox {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

}  // namespace

std::string ValidationReport::format() const {
    if (violations.empty()) return "ok\n";
    std::ostringstream os;
    for (const auto& v : violations) os << "violation: " << v.message << '\n';
    return os.str();
}

ValidationReport validate(const LmoParameters& params) {
    ValidationReport report;
    auto add = [&](Violation::Kind kind, LabelSet s, std::string msg) {
        report.violations.push_back({kind, s, std::move(msg)});
    };
    const auto& space = params.space;
    if (space.size() < 1 || space.size() > kMaxLabels) {
        add(Violation::Kind::bad_space, {}, "label space must have between 1 and 20 labels");
        return report;
    }
    if (params.state_dim < 1) {
        add(Violation::Kind::bad_space, {}, "state dimension must be at least 1");
        return report;
    }
    if (params.weights.size() != space.subset_count()) {
        add(Violation::Kind::bad_space, {}, "weight table must have 2^|L| entries");
        return report;
    }

    double total = 0.0;
    for (std::uint32_t m = 0; m < params.weights.size(); ++m) {
        const double w = params.weights[m];
        if (!std::isfinite(w) || w < 0.0) {
            add(Violation::Kind::negative_weight, LabelSet(m),
                "weight of " + space.format(LabelSet(m)) + " is negative or not finite (" + fmt(w) + ")");
            continue;
        }
        total += w;
    }
    if (std::abs(total - 1.0) > kNormalizationTol) {
        add(Violation::Kind::normalization, {}, "weights sum to " + fmt(total) + ", expected 1");
    }

    for (const auto& [mask, c] : params.conditionals) {
        const LabelSet s(mask);
        if (s.empty() || !s.subset_of(space.full_set())) {
            add(Violation::Kind::shape_mismatch, s, "conditional attached to an invalid label set");
        }
    }

    const auto n_subsets = static_cast<std::uint32_t>(space.subset_count());
    for (std::uint32_t m = 1; m < n_subsets; ++m) {
        const LabelSet s(m);
        if (!(params.weights[m] > 0.0)) continue;
        const auto it = params.conditionals.find(m);
        const std::string name = space.format(s);
        if (it == params.conditionals.end()) {
            add(Violation::Kind::missing_conditional, s, "label set " + name + " has positive weight but no conditional");
            continue;
        }
        const auto n = static_cast<Eigen::Index>(s.size() * params.state_dim);
        const auto& c = it->second;
        if (c.mean.size() != n || c.cov.rows() != n || c.cov.cols() != n) {
            add(Violation::Kind::shape_mismatch, s,
                "conditional of " + name + " must have mean length " + std::to_string(n) + " and a " +
                    std::to_string(n) + "x" + std::to_string(n) + " covariance");
            continue;
        }
        if (!c.mean.allFinite()) {
            add(Violation::Kind::shape_mismatch, s, "conditional mean of " + name + " is not finite");
            continue;
        }
        const auto diag = diagnose_covariance(c.cov);
        if (!diag.finite) {
            add(Violation::Kind::non_pd_covariance, s, "covariance of " + name + " is not finite");
            continue;
        }
        if (!diag.symmetric()) {
            add(Violation::Kind::asymmetric_covariance, s,
                "covariance of " + name + " is asymmetric (max |C - C^T| = " + fmt(diag.asymmetry) + ")");
        }
        if (!diag.positive_definite()) {
            add(Violation::Kind::non_pd_covariance, s,
                "covariance of " + name + " is not positive definite (eigenvalues in [" +
                    fmt(diag.min_eigenvalue) + ", " + fmt(diag.max_eigenvalue) + "])");
        }
    }
    return report;
}

std::vector<PdRepair> repair_covariances(LmoParameters& params, double floor_ratio) {
    std::vector<PdRepair> repairs;
    for (auto& [mask, c] : params.conditionals) {
        if (c.cov.rows() != c.cov.cols() || c.cov.rows() == 0 || !c.cov.allFinite()) continue;
        const auto diag = diagnose_covariance(c.cov);
        if (diag.positive_definite() && diag.symmetric()) continue;
        if (!diag.symmetric()) continue;  // asymmetric input is rejected, not repaired
        const double floor = default_pd_floor(c.cov, floor_ratio);
        if (!(floor > 0.0)) continue;
        const Eigen::MatrixXd fixed = nearest_pd(c.cov, floor);
        repairs.push_back({LabelSet(mask), diag.min_eigenvalue, floor, (fixed - c.cov).norm()});
        c.cov = fixed;
    }
    return repairs;
}

LMODensity::LMODensity(const LmoParameters& params)
    : space_(params.space),
      state_dim_(params.state_dim),
      weights_([&] {
          const auto report = validate(params);
          if (!report.ok()) throw ValidationError("invalid LMO density:\n" + report.format());
          return WeightTable(params.space.size(), params.weights);
      }()),
      conditionals_(params.space.subset_count()) {
    for (std::uint32_t m = 1; m < conditionals_.size(); ++m) {
        if (!(weights_.at(LabelSet(m)) > 0.0)) continue;
        const auto& c = params.conditionals.at(m);
        conditionals_[m].emplace(LabelSet(m), state_dim_, c.mean, c.cov);
    }
}

const GaussianJoint* LMODensity::conditional(LabelSet I) const {
    if (I.mask() >= conditionals_.size()) return nullptr;
    const auto& c = conditionals_[I.mask()];
    return c ? &*c : nullptr;
}

std::vector<LabelSet> LMODensity::support() const {
    std::vector<LabelSet> out;
    for (LabelSet s : enumerate_subsets(space_)) {
        if (weights_.at(s) > 0.0) out.push_back(s);
    }
    return out;
}

double LMODensity::stratum_mass(LabelSet I) const {
    if (!I.subset_of(space_.full_set())) throw DomainError("label set outside the space");
    return weights_.at(I);
}

double LMODensity::log_density(LabelSet I, std::span<const double> x) const {
    if (!I.subset_of(space_.full_set())) throw DomainError("label set outside the space");
    if (x.size() != I.size() * state_dim_) throw DomainError("stacked state has the wrong length for the label set");
    const double w = weights_.at(I);
    if (!(w > 0.0)) return -std::numeric_limits<double>::infinity();
    if (I.empty()) return std::log(w);
    return std::log(w) + conditional(I)->log_evaluate(x);
}

Box LMODensity::support_box(LabelSet I, double width) const {
    Box box;
    const auto* g = conditional(I);
    if (g == nullptr) return box;
    for (Eigen::Index i = 0; i < g->mean().size(); ++i) {
        const double sd = std::sqrt(g->cov()(i, i));
        box.emplace_back(g->mean()[i] - width * sd, g->mean()[i] + width * sd);
    }
    return box;
}

LmoParameters LMODensity::parameters() const {
    LmoParameters p;
    p.space = space_;
    p.state_dim = state_dim_;
    p.weights = weights_.dense();
    for (std::uint32_t m = 1; m < conditionals_.size(); ++m) {
        if (conditionals_[m]) p.conditionals[m] = {conditionals_[m]->mean(), conditionals_[m]->cov()};
    }
    return p;
}

ValidationReport validate(const LMODensity& density) { return validate(density.parameters()); }

GaussianJoint conditional_marginal(const LMODensity& pi, LabelSet I, Label l) {
    if (!I.contains(l)) throw DomainError("label " + std::to_string(l.index) + " is not in the label set");
    const auto* g = pi.conditional(I);
    if (g == nullptr) throw DomainError("label set " + pi.space().format(I) + " has zero weight");
    return marginalize(*g, LabelSet().with(l));
}

GaussianMixture labeled_phd(const LMODensity& pi, Label l) {
    if (!pi.space().contains(l)) throw DomainError("label " + std::to_string(l.index) + " not in space");
    GaussianMixture mix(pi.state_dim());
    for (LabelSet I : enumerate_subsets(pi.space())) {
        if (!I.contains(l)) continue;
        const double w = pi.weights().at(I);
        if (!(w > 0.0)) continue;
        mix.add(w, conditional_marginal(pi, I, l));
    }
    return mix;
}

GaussianMixture unlabeled_phd(const LMODensity& pi) {
    GaussianMixture mix(pi.state_dim());
    for (Label l : pi.space().labels()) mix.append(labeled_phd(pi, l));
    return mix;
}

}  // namespace lmoapprox
