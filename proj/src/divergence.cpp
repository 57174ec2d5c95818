#include "lmoapprox/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "lmoapprox/errors.hpp"
#include "lmoapprox/quadrature.hpp"

namespace lmoapprox {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
const double kLogFloor = std::log(kDensityFloor);

/// h(x, log f(x)) for a point x drawn from (or integrated against) f.
using LogTerm = std::function<double(std::span<const double>, double)>;

struct Expectation {
    double value = 0.0;
    double error_bound = 0.0;
    KldMethod method = KldMethod::grid;
    bool infinite = false;
};

std::size_t grid_points(std::size_t dim, std::size_t low, std::size_t high) {
    std::size_t m = dim <= 2 ? low : high;
    return m % 2 == 0 ? m + 1 : m;
}

// E_f[h] for a Gaussian f. Grid path: trapezoidal rule on z in
// [-W, W]^k with x = mean + L z, so the grid follows f's own shape no
// matter how anisotropic its covariance is.
Expectation gaussian_expectation(const GaussianJoint& f, const LogTerm& h, const KldConfig& cfg,
                                 std::uint64_t stream, const std::string& what) {
    const std::size_t k = f.dim();
    const double log_norm = -0.5 * (static_cast<double>(k) * kLog2Pi + f.log_det());
    const Eigen::VectorXd& mean = f.mean();
    const Eigen::MatrixXd& L = f.chol();

    auto to_x = [&](std::span<const double> z, std::span<double> x) {
        for (std::size_t i = 0; i < k; ++i) {
            double s = mean[static_cast<Eigen::Index>(i)];
            for (std::size_t j = 0; j <= i; ++j) s += L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * z[j];
            x[i] = s;
        }
    };

    const bool use_mc = cfg.force_monte_carlo || k > kMaxGridDim;
    if (use_mc) {
        if (!cfg.allow_monte_carlo) {
            throw NumericalRefusal("stratum " + what + " is " + std::to_string(k) +
                                   "-dimensional; grid quadrature supports at most 3 dimensions and Monte Carlo is disabled");
        }
        if (cfg.mc_samples < 2) throw DomainError("Monte Carlo needs at least 2 samples");
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> normal;
        std::vector<double> z(k), x(k);
        double mean_acc = 0.0;
        double m2 = 0.0;
        for (std::size_t n = 1; n <= cfg.mc_samples; ++n) {
            double zz = 0.0;
            for (auto& zi : z) {
                zi = normal(rng);
                zz += zi * zi;
            }
            to_x(z, x);
            const double v = h(x, log_norm - 0.5 * zz);
            if (std::isinf(v)) return {kInf, 0.0, KldMethod::montecarlo, true};
            const double delta = v - mean_acc;
            mean_acc += delta / static_cast<double>(n);
            m2 += delta * (v - mean_acc);
        }
        const double n = static_cast<double>(cfg.mc_samples);
        const double sd = std::sqrt(m2 / (n - 1.0));
        return {mean_acc, 3.0 * sd / std::sqrt(n), KldMethod::montecarlo, false};
    }

    const double W = cfg.width;
    const auto m = grid_points(k, cfg.points_low_dim, cfg.points_3d);
    const auto grid = QuadratureGrid::uniform(k, -W, W, m);
    const double log_phi0 = -0.5 * static_cast<double>(k) * kLog2Pi;
    const Integrand integrand = [&](std::span<const double> z) {
        double zz = 0.0;
        for (double zi : z) zz += zi * zi;
        const double log_phi = log_phi0 - 0.5 * zz;
        if (log_phi + log_norm - log_phi0 < kLogFloor) return 0.0;
        double xb[kMaxGridDim];
        std::span<double> x(xb, k);
        to_x(z, x);
        const double v = h(x, log_norm - 0.5 * zz);
        if (std::isinf(v)) return v;
        return std::exp(log_phi) * v;
    };
    const auto r = integrate_refined(integrand, grid);
    if (std::isinf(r.fine) || std::isnan(r.fine)) return {kInf, 0.0, KldMethod::grid, true};

    // Tail truncation: mass outside the box times the largest |h| seen on
    // the axis extremes and corners of the box.
    double h_max = 0.0;
    std::vector<double> z(k), x(k);
    auto probe = [&] {
        double zz = 0.0;
        for (double zi : z) zz += zi * zi;
        to_x(z, x);
        const double v = h(x, log_norm - 0.5 * zz);
        if (std::isfinite(v)) h_max = std::max(h_max, std::abs(v));
    };
    for (std::size_t i = 0; i < k; ++i) {
        for (double s : {-W, W}) {
            std::fill(z.begin(), z.end(), 0.0);
            z[i] = s;
            probe();
        }
    }
    for (std::uint32_t c = 0; c < (1u << k); ++c) {
        for (std::size_t i = 0; i < k; ++i) z[i] = (c >> i & 1u) ? W : -W;
        probe();
    }
    const double outside = static_cast<double>(k) * std::erfc(W / std::sqrt(2.0));
    return {r.fine, r.delta() + outside * (1.0 + h_max), KldMethod::grid, false};
}

std::uint64_t stream_id(LabelSet I, std::size_t slot) { return (std::uint64_t{I.mask()} << 8) | slot; }

Box box_union(const Box& a, const Box& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    Box out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = {std::min(a[i].first, b[i].first), std::max(a[i].second, b[i].second)};
    }
    return out;
}

}  // namespace

std::string to_string(KldMethod m) {
    switch (m) {
        case KldMethod::exact: return "exact";
        case KldMethod::grid: return "grid";
        case KldMethod::montecarlo: return "montecarlo";
    }
    return "unknown";
}

KLDEstimate kld(const LMODensity& f, const LabeledDensity& g, const KldConfig& cfg) {
    if (!(f.space() == g.space()) || f.state_dim() != g.state_dim()) {
        throw DomainError("KLD between densities on different spaces");
    }
    KLDEstimate est;
    for (LabelSet I : f.support()) {
        const double w = f.weights().at(I);
        StratumTerm term{I};
        if (I.empty()) {
            const double lg = g.log_density(I, {});
            term.method = KldMethod::exact;
            if (lg < kLogFloor) {
                term.value = kInf;
            } else {
                term.value = w * (std::log(w) - lg);
            }
        } else {
            const double log_w = std::log(w);
            const LogTerm h = [&](std::span<const double> x, double log_f) {
                const double lg = g.log_density(I, x);
                if (lg < kLogFloor) return kInf;
                return log_w + log_f - lg;
            };
            const auto e = gaussian_expectation(*f.conditional(I), h, cfg, stream_id(I, 0), f.space().format(I));
            term.method = e.method;
            term.value = e.infinite ? kInf : w * e.value;
            term.error_bound = w * e.error_bound;
        }
        if (std::isinf(term.value) && !est.infinite_stratum) est.infinite_stratum = I;
        if (term.method == KldMethod::montecarlo) est.method = KldMethod::montecarlo;
        est.value += term.value;
        est.error_bound += term.error_bound;
        est.per_stratum.push_back(term);
    }
    return est;
}

KLDDecomposition kld_decompose(const LMODensity& f, const FactorizedDensity& g, const KldConfig& cfg) {
    if (!(f.space() == g.space()) || f.state_dim() != g.state_dim()) {
        throw DomainError("KLD between densities on different spaces");
    }
    KLDDecomposition out;
    for (LabelSet I : f.support()) {
        const double w = f.weights().at(I);
        const double w_hat = g.weight(I);
        if (!(w_hat > 0.0)) {
            if (!out.infinite_stratum) out.infinite_stratum = I;
            out.c_omega = kInf;
        } else if (std::isfinite(out.c_omega)) {
            out.c_omega += w * std::log(w / w_hat);
        }
        if (I.empty()) continue;

        const auto& joint = *f.conditional(I);
        StratumTerm term{I, -joint.entropy(), 0.0, KldMethod::exact};
        std::size_t slot = 0;
        for (Label l : I.members()) {
            const auto marginal = marginalize(joint, LabelSet().with(l));
            const auto& q = g.factor(I, l);
            if (q.size() == 1 && q.components().front().weight == 1.0) {
                term.value += gaussian_cross_entropy(marginal, q.components().front().density);
                continue;
            }
            const LogTerm h = [&q](std::span<const double> x, double) {
                const double lq = q.log_evaluate(x);
                return lq < kLogFloor ? kInf : -lq;
            };
            const auto e = gaussian_expectation(marginal, h, cfg, stream_id(I, ++slot),
                                                f.space().format(I) + " label " + f.space().name(l));
            if (e.method != KldMethod::exact) term.method = e.method;
            term.value += e.infinite ? kInf : e.value;
            term.error_bound += e.error_bound;
        }
        term.value *= w;
        term.error_bound *= w;
        out.c_p += term.value;
        out.error_bound += term.error_bound;
        out.c_p_per_stratum.push_back(term);
    }
    out.total = out.c_omega + out.c_p;
    return out;
}

PythagoreanCheck pythagorean_residual(const LMODensity& f, const KldConfig& cfg) {
    const auto lmb = approx_lmb(f);
    const auto dglmb = approx_delta_glmb(f);
    PythagoreanCheck c;
    c.pi_lmb = kld(f, lmb, cfg);
    c.pi_dglmb = kld(f, dglmb, cfg);
    c.dglmb_lmb = kld(dglmb.as_lmo(), lmb, cfg);
    c.residual = c.pi_lmb.value - c.pi_dglmb.value - c.dglmb_lmb.value;
    c.error_bound = c.pi_lmb.error_bound + c.pi_dglmb.error_bound + c.dglmb_lmb.error_bound;
    return c;
}

ExponentialSegment::ExponentialSegment(std::shared_ptr<const LabeledDensity> p,
                                       std::shared_ptr<const LabeledDensity> q, double alpha,
                                       const SegmentConfig& cfg)
    : p_(std::move(p)), q_(std::move(q)), alpha_(alpha), width_(cfg.width) {
    if (!p_ || !q_) throw DomainError("exponential segment needs two densities");
    if (!(p_->space() == q_->space()) || p_->state_dim() != q_->state_dim()) {
        throw DomainError("exponential segment between densities on different spaces");
    }
    if (!(alpha_ >= 0.0 && alpha_ <= 1.0)) throw DomainError("segment parameter must lie in [0, 1]");

    const auto& space = p_->space();
    stratum_integrals_.assign(space.subset_count(), 0.0);
    double total = 0.0;
    double error = 0.0;
    for (LabelSet I : enumerate_subsets(space)) {
        const bool need_p = alpha_ < 1.0;
        const bool need_q = alpha_ > 0.0;
        if ((need_p && !(p_->stratum_mass(I) > 0.0)) || (need_q && !(q_->stratum_mass(I) > 0.0))) continue;
        if (I.empty()) {
            const double v = std::exp(log_unnormalized(I, {}));
            stratum_integrals_[0] = v;
            total += v;
            continue;
        }
        const Box box = box_union(need_p ? p_->support_box(I, width_) : Box{},
                                  need_q ? q_->support_box(I, width_) : Box{});
        const std::size_t k = box.size();
        if (k > kMaxGridDim) {
            throw NumericalRefusal("exponential segment stratum " + space.format(I) + " exceeds 3 dimensions");
        }
        std::vector<GridAxis> axes;
        const auto m = grid_points(k, cfg.points_low_dim, cfg.points_3d);
        for (const auto& [lo, hi] : box) axes.push_back({lo, hi, m});
        const Integrand integrand = [this, I](std::span<const double> x) {
            return std::exp(log_unnormalized(I, x));
        };
        const auto r = integrate_refined(integrand, QuadratureGrid(std::move(axes)));
        stratum_integrals_[I.mask()] = r.fine;
        total += r.fine;
        error += r.delta();
    }
    if (!(total > 0.0)) {
        degenerate_ = true;
        psi_ = kInf;
        return;
    }
    psi_ = std::log(total);
    psi_error_ = error / total;
}

double ExponentialSegment::log_unnormalized(LabelSet I, std::span<const double> x) const {
    double s = 0.0;
    if (alpha_ < 1.0) {
        const double lp = p_->log_density(I, x);
        if (lp == -kInf) return -kInf;
        s += (1.0 - alpha_) * lp;
    }
    if (alpha_ > 0.0) {
        const double lq = q_->log_density(I, x);
        if (lq == -kInf) return -kInf;
        s += alpha_ * lq;
    }
    return s;
}

double ExponentialSegment::stratum_mass(LabelSet I) const {
    if (degenerate_) return 0.0;
    return stratum_integrals_.at(I.mask()) / std::exp(psi_);
}

double ExponentialSegment::log_density(LabelSet I, std::span<const double> x) const {
    if (degenerate_) return -kInf;
    return log_unnormalized(I, x) - psi_;
}

Box ExponentialSegment::support_box(LabelSet I, double width) const {
    if (degenerate_ || !(stratum_mass(I) > 0.0)) return {};
    return box_union(alpha_ < 1.0 ? p_->support_box(I, width) : Box{}, alpha_ > 0.0 ? q_->support_box(I, width) : Box{});
}

ExponentialSegment exponential_segment(std::shared_ptr<const LabeledDensity> p,
                                       std::shared_ptr<const LabeledDensity> q, double alpha,
                                       const SegmentConfig& cfg) {
    return ExponentialSegment(std::move(p), std::move(q), alpha, cfg);
}

}  // namespace lmoapprox
