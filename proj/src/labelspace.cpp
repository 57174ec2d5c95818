#include "lmoapprox/labelspace.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lmoapprox/errors.hpp"

namespace lmoapprox {

LabelSet LabelSet::of(std::initializer_list<std::size_t> indices) {
    std::uint32_t mask = 0;
    for (std::size_t i : indices) {
        if (i < 1 || i > kMaxLabels) throw DomainError("label index out of range");
        mask |= 1u << (i - 1);
    }
    return LabelSet(mask);
}

LabelSet LabelSet::from_labels(std::span<const Label> labels) {
    std::uint32_t mask = 0;
    for (Label l : labels) {
        if (l.index < 1 || l.index > kMaxLabels) throw DomainError("label index out of range");
        const std::uint32_t bit = 1u << (l.index - 1);
        if (mask & bit) throw DomainError("duplicate label " + std::to_string(l.index));
        mask |= bit;
    }
    return LabelSet(mask);
}

std::size_t LabelSet::size() const { return static_cast<std::size_t>(std::popcount(mask_)); }

std::vector<Label> LabelSet::members() const {
    std::vector<Label> out;
    out.reserve(size());
    for (std::uint32_t m = mask_; m != 0; m &= m - 1) {
        out.push_back(Label{static_cast<std::size_t>(std::countr_zero(m)) + 1});
    }
    return out;
}

std::size_t LabelSet::position_of(Label l) const {
    if (!contains(l)) throw DomainError("label " + std::to_string(l.index) + " not in set");
    const std::uint32_t below = mask_ & ((1u << (l.index - 1)) - 1u);
    return static_cast<std::size_t>(std::popcount(below));
}

bool canonical_less(LabelSet a, LabelSet b) {
    const auto na = a.size();
    const auto nb = b.size();
    if (na != nb) return na < nb;
    // Same cardinality: lexicographic on sorted indices. The first
    // differing lowest bit decides: the set owning it sorts first.
    const std::uint32_t diff = a.mask() ^ b.mask();
    if (diff == 0) return false;
    const std::uint32_t lowest = diff & (~diff + 1u);
    return (a.mask() & lowest) != 0;
}

LabelSpace::LabelSpace(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty() || names_.size() > kMaxLabels) {
        throw DomainError("label space size must be in [1, " + std::to_string(kMaxLabels) + "]");
    }
    auto sorted = names_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw DomainError("label names must be distinct");
    }
}

LabelSpace LabelSpace::numbered(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= n; ++i) names.push_back(std::to_string(i));
    return LabelSpace(std::move(names));
}

Label LabelSpace::label(std::size_t index) const {
    if (index < 1 || index > size()) throw DomainError("label index " + std::to_string(index) + " out of range");
    return Label{index};
}

std::vector<Label> LabelSpace::labels() const {
    std::vector<Label> out;
    for (std::size_t i = 1; i <= size(); ++i) out.push_back(Label{i});
    return out;
}

const std::string& LabelSpace::name(Label l) const {
    if (!contains(l)) throw DomainError("label " + std::to_string(l.index) + " not in space");
    return names_[l.index - 1];
}

Label LabelSpace::find(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw DomainError("unknown label '" + name + "'");
    return Label{static_cast<std::size_t>(it - names_.begin()) + 1};
}

LabelSet LabelSpace::full_set() const {
    return LabelSet(size() == 32 ? ~0u : (1u << size()) - 1u);
}

std::string LabelSpace::format(LabelSet s) const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (Label l : s.members()) {
        if (!first) os << ',';
        os << name(l);
        first = false;
    }
    os << '}';
    return os.str();
}

std::vector<LabelSet> enumerate_subsets(const LabelSpace& space, std::optional<std::size_t> n) {
    const std::size_t size = space.size();
    if (n && *n > size) {
        throw DomainError("cardinality " + std::to_string(*n) + " exceeds label space size " +
                          std::to_string(size));
    }
    std::vector<LabelSet> out;
    const std::uint32_t count = 1u << size;
    out.reserve(n ? 0 : count);
    for (std::uint32_t m = 0; m < count; ++m) {
        if (!n || static_cast<std::size_t>(std::popcount(m)) == *n) out.emplace_back(m);
    }
    std::sort(out.begin(), out.end(), canonical_less);
    return out;
}

LabelSet canonical_prefix(const LabelSpace& space, std::size_t n) {
    if (n > space.size()) {
        throw DomainError("prefix length " + std::to_string(n) + " exceeds label space size");
    }
    return LabelSet(n == 0 ? 0u : (1u << n) - 1u);
}

namespace {

void check_weights(const std::vector<double>& dense) {
    for (std::size_t m = 0; m < dense.size(); ++m) {
        if (!std::isfinite(dense[m]) || dense[m] < 0.0) {
            throw ValidationError("weight of subset mask " + std::to_string(m) +
                                  " is negative or not finite");
        }
    }
}

void normalize_or_throw(std::vector<double>& dense, bool renormalize) {
    const double total = std::accumulate(dense.begin(), dense.end(), 0.0);
    if (renormalize) {
        if (!(total > 0.0)) throw ValidationError("cannot renormalize weights with zero total");
        for (double& w : dense) w /= total;
        return;
    }
    if (std::abs(total - 1.0) > kNormalizationTol) {
        std::ostringstream os;
        os.precision(12);
        os << "weights sum to " << total << ", expected 1";
        throw ValidationError(os.str());
    }
}

}  // namespace

WeightTable::WeightTable(const LabelSpace& space, std::span<const Entry> entries, bool renormalize)
    : n_labels_(space.size()), dense_(space.subset_count(), 0.0) {
    std::vector<bool> seen(dense_.size(), false);
    for (const auto& e : entries) {
        if (!e.set.subset_of(space.full_set())) throw ValidationError("weight entry outside label space");
        if (seen[e.set.mask()]) throw ValidationError("duplicate weight entry for " + space.format(e.set));
        seen[e.set.mask()] = true;
        dense_[e.set.mask()] = e.weight;
    }
    check_weights(dense_);
    normalize_or_throw(dense_, renormalize);
}

WeightTable::WeightTable(std::size_t n_labels, std::vector<double> dense, bool renormalize)
    : n_labels_(n_labels), dense_(std::move(dense)) {
    if (n_labels_ < 1 || n_labels_ > kMaxLabels || dense_.size() != (std::size_t{1} << n_labels_)) {
        throw ValidationError("dense weight table must have 2^|L| entries");
    }
    check_weights(dense_);
    normalize_or_throw(dense_, renormalize);
}

WeightTable WeightTable::unchecked(std::size_t n_labels, std::vector<double> dense) {
    WeightTable t;
    t.n_labels_ = n_labels;
    t.dense_ = std::move(dense);
    return t;
}

double WeightTable::total() const { return std::accumulate(dense_.begin(), dense_.end(), 0.0); }

CardinalityDistribution CardinalityDistribution::finite(std::vector<double> probs) {
    if (probs.empty()) throw ValidationError("empty cardinality distribution");
    double total = 0.0;
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0.0) throw ValidationError("cardinality probability negative or not finite");
        total += p;
    }
    if (std::abs(total - 1.0) > kNormalizationTol) throw ValidationError("cardinality distribution does not sum to 1");
    CardinalityDistribution c;
    c.kind_ = Kind::finite;
    c.probs_ = std::move(probs);
    return c;
}

double poisson_pmf(double rate, std::size_t n) {
    if (rate == 0.0) return n == 0 ? 1.0 : 0.0;
    const double k = static_cast<double>(n);
    return std::exp(-rate + k * std::log(rate) - std::lgamma(k + 1.0));
}

CardinalityDistribution CardinalityDistribution::poisson(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("Poisson rate must be positive and finite");
    CardinalityDistribution c;
    c.kind_ = Kind::poisson;
    c.rate_ = rate;
    for (std::size_t n = 0;; ++n) {
        c.probs_.push_back(poisson_pmf(rate, n));
        double tail = 0.0;
        for (std::size_t j = n + 1;; ++j) {
            const double q = poisson_pmf(rate, j);
            tail += q;
            if (static_cast<double>(j) > rate && q < 1e-30) break;
        }
        if (tail < 1e-12) break;
    }
    return c;
}

double CardinalityDistribution::total() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

double CardinalityDistribution::tail(std::size_t n) const {
    double s = 0.0;
    for (std::size_t k = n; k < probs_.size(); ++k) s += probs_[k];
    return s;
}

CardinalityDistribution cardinality_from_weights(const WeightTable& w) {
    const double total = w.total();
    if (std::abs(total - 1.0) > kNormalizationTol) throw ValidationError("weight table is not normalized");
    std::vector<double> probs(w.n_labels() + 1, 0.0);
    const auto& dense = w.dense();
    for (std::uint32_t m = 0; m < dense.size(); ++m) {
        probs[static_cast<std::size_t>(std::popcount(m))] += dense[m];
    }
    return CardinalityDistribution::finite(std::move(probs));
}

double mean_cardinality(const CardinalityDistribution& rho) {
    if (rho.kind() == CardinalityDistribution::Kind::poisson) return rho.rate();
    double mean = 0.0;
    for (std::size_t n = 0; n < rho.probs().size(); ++n) mean += static_cast<double>(n) * rho.probs()[n];
    return mean;
}

}  // namespace lmoapprox
