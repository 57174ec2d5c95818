#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lmoapprox/approx.hpp"
#include "lmoapprox/density.hpp"
#include "lmoapprox/lmo.hpp"

namespace lmoapprox {

/// Densities below this value are treated as zero.
inline constexpr double kDensityFloor = 1e-300;

struct KldConfig {
    /// Points per axis for 1-D and 2-D strata (odd, so the grid nests a
    /// half-resolution grid for the refinement error estimate).
    std::size_t points_low_dim = 401;
    /// Points per axis for 3-D strata.
    std::size_t points_3d = 121;
    /// Half-width of the integration box in standard-normal units.
    double width = 8.0;
    /// Samples per stratum on the Monte Carlo path.
    std::size_t mc_samples = 200000;
    std::uint64_t seed = 20190621;
    /// Strata above three dimensions need Monte Carlo; when disabled they
    /// raise NumericalRefusal instead.
    bool allow_monte_carlo = true;
    /// Use Monte Carlo on every nonempty stratum (for testing the MC path).
    bool force_monte_carlo = false;
};

enum class KldMethod { exact, grid, montecarlo };

std::string to_string(KldMethod m);

struct StratumTerm {
    LabelSet set;
    double value = 0.0;
    double error_bound = 0.0;
    KldMethod method = KldMethod::exact;
};

/// Set-integral divergence split into label-set strata.
struct KLDEstimate {
    double value = 0.0;
    double error_bound = 0.0;
    /// grid unless some stratum used Monte Carlo.
    KldMethod method = KldMethod::grid;
    std::vector<StratumTerm> per_stratum;  // canonical order
    /// First stratum where f > 0 but g = 0 (value is then +inf).
    std::optional<LabelSet> infinite_stratum;

    [[nodiscard]] bool infinite() const { return infinite_stratum.has_value(); }
};

/// D_KL(f; g) = sum over label sets I with w(I) > 0 of
/// int f_I log(f_I / g_I) dx. Strata up to three dimensions are integrated
/// on a trapezoidal grid in the whitened coordinates of f's conditional;
/// higher strata are sampled from f_I. The error bound sums the grid
/// refinement deltas, a tail-truncation term and 3-sigma MC errors.
KLDEstimate kld(const LMODensity& f, const LabeledDensity& g, const KldConfig& cfg = {});

/// D_KL(f; g) = C(w_hat) + C(P_hat) for a factorized g.
struct KLDDecomposition {
    double c_omega = 0.0;  // sum_I w(I) log(w(I) / w_hat(I))
    double c_p = 0.0;      // sum_I w(I) int P_I log(P_I / P_hat_I)
    double total = 0.0;
    double error_bound = 0.0;  // on c_p; c_omega is an exact finite sum
    std::optional<LabelSet> infinite_stratum;  // w_hat(I) = 0 with w(I) > 0
    std::vector<StratumTerm> c_p_per_stratum;

    [[nodiscard]] bool infinite() const { return infinite_stratum.has_value(); }
};

/// Uses the product structure of g: -H(P_I) in closed form and one
/// single-object cross entropy per (I, l), so it shares no integration
/// path with kld().
KLDDecomposition kld_decompose(const LMODensity& f, const FactorizedDensity& g, const KldConfig& cfg = {});

struct PythagoreanCheck {
    KLDEstimate pi_lmb;       // D(pi; LMB)
    KLDEstimate pi_dglmb;     // D(pi; delta-GLMB)
    KLDEstimate dglmb_lmb;    // D(delta-GLMB; LMB)
    double residual = 0.0;    // pi_lmb - pi_dglmb - dglmb_lmb
    double error_bound = 0.0; // sum of the three error bounds
};

/// Checks D(pi; LMB) = D(pi; delta-GLMB) + D(delta-GLMB; LMB) numerically.
PythagoreanCheck pythagorean_residual(const LMODensity& f, const KldConfig& cfg = {});

struct SegmentConfig {
    std::size_t points_low_dim = 401;
    std::size_t points_3d = 121;
    /// Box half-width in standard deviations around both densities' mass.
    double width = 8.0;
};

/// Normalized exponential segment p^(1-alpha) q^alpha exp(-psi(alpha)).
/// Holds shared ownership of both end points.
class ExponentialSegment : public LabeledDensity {
public:
    ExponentialSegment(std::shared_ptr<const LabeledDensity> p, std::shared_ptr<const LabeledDensity> q,
                       double alpha, const SegmentConfig& cfg = {});

    [[nodiscard]] const LabelSpace& space() const override { return p_->space(); }
    [[nodiscard]] std::size_t state_dim() const override { return p_->state_dim(); }
    [[nodiscard]] double stratum_mass(LabelSet I) const override;
    [[nodiscard]] double log_density(LabelSet I, std::span<const double> x) const override;
    [[nodiscard]] Box support_box(LabelSet I, double width) const override;

    [[nodiscard]] double alpha() const { return alpha_; }
    /// log of the set integral of p^(1-alpha) q^alpha; +inf (flagged by
    /// degenerate()) when the supports do not overlap.
    [[nodiscard]] double psi() const { return psi_; }
    [[nodiscard]] double psi_error() const { return psi_error_; }
    [[nodiscard]] bool degenerate() const { return degenerate_; }

private:
    [[nodiscard]] double log_unnormalized(LabelSet I, std::span<const double> x) const;

    std::shared_ptr<const LabeledDensity> p_;
    std::shared_ptr<const LabeledDensity> q_;
    double alpha_;
    double width_;
    double psi_ = 0.0;
    double psi_error_ = 0.0;
    bool degenerate_ = false;
    std::vector<double> stratum_integrals_;  // unnormalized, by mask
};

ExponentialSegment exponential_segment(std::shared_ptr<const LabeledDensity> p,
                                       std::shared_ptr<const LabeledDensity> q, double alpha,
                                       const SegmentConfig& cfg = {});

}  // namespace lmoapprox
