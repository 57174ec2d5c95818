#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lmoapprox {

/// Largest label space handled by dense power-set storage.
inline constexpr std::size_t kMaxLabels = 20;

/// Tolerance on the total mass of a weight table or cardinality distribution.
inline constexpr double kNormalizationTol = 1e-9;

/// A label, identified by its 1-based canonical index in a LabelSpace.
struct Label {
    std::size_t index = 0;

    friend constexpr bool operator==(Label, Label) = default;
    friend constexpr auto operator<=>(Label, Label) = default;
};

/// A subset of a label space stored as a bitmask (bit i-1 <-> label index i).
class LabelSet {
public:
    constexpr LabelSet() = default;
    constexpr explicit LabelSet(std::uint32_t mask) : mask_(mask) {}

    static LabelSet of(std::initializer_list<std::size_t> indices);
    static LabelSet from_labels(std::span<const Label> labels);

    [[nodiscard]] constexpr std::uint32_t mask() const { return mask_; }
    [[nodiscard]] constexpr bool empty() const { return mask_ == 0; }
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] constexpr bool contains(Label l) const {
        return l.index >= 1 && l.index <= 32 && (mask_ >> (l.index - 1) & 1u) != 0;
    }
    [[nodiscard]] constexpr bool subset_of(LabelSet other) const {
        return (mask_ & ~other.mask_) == 0;
    }
    [[nodiscard]] constexpr LabelSet without(Label l) const {
        return LabelSet(mask_ & ~(1u << (l.index - 1)));
    }
    [[nodiscard]] constexpr LabelSet with(Label l) const {
        return LabelSet(mask_ | (1u << (l.index - 1)));
    }

    /// Members in canonical (increasing index) order.
    [[nodiscard]] std::vector<Label> members() const;

    /// Position of `l` among the members, i.e. its coordinate block in a
    /// stacked state vector. Throws DomainError if `l` is not a member.
    [[nodiscard]] std::size_t position_of(Label l) const;

    friend constexpr bool operator==(LabelSet, LabelSet) = default;

private:
    std::uint32_t mask_ = 0;
};

/// Canonical subset order: by cardinality, then lexicographic on indices.
bool canonical_less(LabelSet a, LabelSet b);

/// An ordered, finite label space alpha_1, alpha_2, ... with display names.
class LabelSpace {
public:
    LabelSpace() = default;
    explicit LabelSpace(std::vector<std::string> names);
    /// Space with labels named "1".."n".
    static LabelSpace numbered(std::size_t n);

    [[nodiscard]] std::size_t size() const { return names_.size(); }
    [[nodiscard]] Label label(std::size_t index) const;
    [[nodiscard]] std::vector<Label> labels() const;
    [[nodiscard]] const std::string& name(Label l) const;
    [[nodiscard]] const std::vector<std::string>& names() const { return names_; }
    [[nodiscard]] Label find(const std::string& name) const;
    [[nodiscard]] bool contains(Label l) const { return l.index >= 1 && l.index <= size(); }
    [[nodiscard]] LabelSet full_set() const;
    [[nodiscard]] std::size_t subset_count() const { return std::size_t{1} << size(); }

    /// Brace-enclosed label names, e.g. "{1,2}".
    [[nodiscard]] std::string format(LabelSet s) const;

    friend bool operator==(const LabelSpace&, const LabelSpace&) = default;

private:
    std::vector<std::string> names_;
};

/// All subsets of `space` (or only those of cardinality n) in canonical order.
std::vector<LabelSet> enumerate_subsets(const LabelSpace& space,
                                        std::optional<std::size_t> n = std::nullopt);

/// The first n labels of the space, L(n) = {alpha_1, ..., alpha_n}.
LabelSet canonical_prefix(const LabelSpace& space, std::size_t n);

/// Weights over all 2^|L| label subsets, stored densely by bitmask.
class WeightTable {
public:
    struct Entry {
        LabelSet set;
        double weight;
    };

    /// Builds a table from the listed entries; absent subsets read as 0.
    /// Throws ValidationError on negative/non-finite weights, duplicate
    /// subsets, or a total outside 1 +- 1e-9 unless `renormalize` is set.
    WeightTable(const LabelSpace& space, std::span<const Entry> entries, bool renormalize = false);

    /// Wraps a dense vector indexed by mask. Same validation as above.
    WeightTable(std::size_t n_labels, std::vector<double> dense, bool renormalize = false);

    /// Builds a table without the normalization check (used to report on
    /// bad input rather than reject it).
    static WeightTable unchecked(std::size_t n_labels, std::vector<double> dense);

    [[nodiscard]] std::size_t n_labels() const { return n_labels_; }
    [[nodiscard]] double at(LabelSet s) const { return dense_.at(s.mask()); }
    [[nodiscard]] double total() const;
    [[nodiscard]] const std::vector<double>& dense() const { return dense_; }

private:
    WeightTable() = default;
    std::size_t n_labels_ = 0;
    std::vector<double> dense_;
};

/// Probability vector over object counts n = 0..n_max.
class CardinalityDistribution {
public:
    enum class Kind { finite, poisson };

    /// Finite distribution; throws ValidationError unless entries are
    /// nonnegative and sum to 1 +- 1e-9.
    static CardinalityDistribution finite(std::vector<double> probs);

    /// Poisson(rate) truncated at the smallest n_max whose upper tail
    /// mass falls below 1e-12. Throws DomainError unless rate > 0.
    static CardinalityDistribution poisson(double rate);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] double rate() const { return rate_; }
    [[nodiscard]] const std::vector<double>& probs() const { return probs_; }
    [[nodiscard]] std::size_t n_max() const { return probs_.size() - 1; }
    /// P(N = n); zero beyond the stored range.
    [[nodiscard]] double operator[](std::size_t n) const { return n < probs_.size() ? probs_[n] : 0.0; }
    [[nodiscard]] double total() const;
    /// P(N >= n) over the stored range.
    [[nodiscard]] double tail(std::size_t n) const;

private:
    CardinalityDistribution() = default;
    Kind kind_ = Kind::finite;
    double rate_ = 0.0;
    std::vector<double> probs_;
};

/// rho(n) = sum of w(I) over |I| = n.
CardinalityDistribution cardinality_from_weights(const WeightTable& w);

/// sum_n n rho(n); the rate for a Poisson distribution.
double mean_cardinality(const CardinalityDistribution& rho);

/// Poisson probability mass exp(-rate) rate^n / n!.
double poisson_pmf(double rate, std::size_t n);

}  // namespace lmoapprox
