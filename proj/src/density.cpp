#include "lmoapprox/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lmoapprox/errors.hpp"

namespace lmoapprox {

LabeledState::LabeledState(std::vector<std::pair<Label, Eigen::VectorXd>> pairs) : pairs_(std::move(pairs)) {
    std::sort(pairs_.begin(), pairs_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Label> labels;
    for (const auto& [l, x] : pairs_) {
        labels.push_back(l);
        if (x.size() != pairs_.front().second.size() || x.size() == 0) {
            throw DomainError("labeled state mixes state dimensions");
        }
    }
    // from_labels rejects duplicates (distinct-label indicator would be 0).
    labels_ = LabelSet::from_labels(labels);
}

std::vector<double> LabeledState::stacked() const {
    std::vector<double> out;
    for (const auto& [l, x] : pairs_) out.insert(out.end(), x.data(), x.data() + x.size());
    return out;
}

std::size_t LabeledState::state_dim() const {
    return pairs_.empty() ? 0 : static_cast<std::size_t>(pairs_.front().second.size());
}

double LabeledDensity::density_at(const LabeledState& X) const {
    if (!X.labels().subset_of(space().full_set())) throw DomainError("labeled state has a label outside the space");
    if (!X.empty() && X.state_dim() != state_dim()) throw DomainError("labeled state has the wrong state dimension");
    const auto x = X.stacked();
    return std::exp(log_density(X.labels(), x));
}

double FactorizedDensity::log_density(LabelSet I, std::span<const double> x) const {
    const std::size_t d = state_dim();
    if (x.size() != I.size() * d) throw DomainError("stacked state has the wrong length for the label set");
    const double w = weight(I);
    if (!(w > 0.0)) return -std::numeric_limits<double>::infinity();
    double s = std::log(w);
    std::size_t offset = 0;
    for (Label l : I.members()) {
        s += factor(I, l).log_evaluate(x.subspan(offset, d));
        offset += d;
    }
    return s;
}

Box FactorizedDensity::support_box(LabelSet I, double width) const {
    Box box;
    if (I.empty() || !(weight(I) > 0.0)) return box;
    for (Label l : I.members()) {
        const auto b = factor(I, l).bounding_box(width);
        box.insert(box.end(), b.begin(), b.end());
    }
    return box;
}

}  // namespace lmoapprox
