#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles
// here deliberately avoid the library's numerical paths: Gaussian
// densities use an explicit inverse and determinant, integrals use a
// plain nested trapezoid loop, subset sums use raw bit loops.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "lmoapprox/approx.hpp"
#include "lmoapprox/lmo.hpp"
#include "lmoapprox/spec_io.hpp"

namespace lmotest {

using namespace lmoapprox;

inline LmoParameters example_parameters(bool fix_pd) {
    auto spec = paper_example();
    spec.options.fix_pd = fix_pd;
    return decode_spec(spec).params;
}

inline LMODensity example_density() { return LMODensity(example_parameters(true)); }

/// nearest_pd(R_123) from numpy.linalg.eigh with eigenvalues clamped at
/// 1e-3 * lambda_max.
inline Eigen::Matrix3d repaired_r123() {
    Eigen::Matrix3d m;
    m << 1.4574975794435099, 1.81984744530856, 0.9513052265062305,  //
        1.81984744530856, 2.3260397982458385, 1.0340682342101308,   //
        0.9513052265062304, 1.034068234210131, 1.2092085563318062;
    return m;
}

inline double oracle_gaussian_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
    const auto k = static_cast<double>(mean.size());
    const Eigen::VectorXd r = x - mean;
    const double q = r.dot(cov.inverse() * r);
    return std::exp(-0.5 * q) / std::sqrt(std::pow(2.0 * std::numbers::pi, k) * cov.determinant());
}

inline double oracle_normal_pdf(double x, double mean, double var) {
    return std::exp(-0.5 * (x - mean) * (x - mean) / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

/// Plain trapezoid over an axis-aligned box, m points per axis (dim 1..3).
inline double oracle_trapz(const std::function<double(const std::vector<double>&)>& f,
                           const std::vector<std::pair<double, double>>& box, int m) {
    const std::size_t dim = box.size();
    std::vector<double> h(dim);
    for (std::size_t k = 0; k < dim; ++k) h[k] = (box[k].second - box[k].first) / (m - 1);
    std::vector<int> idx(dim, 0);
    std::vector<double> x(dim);
    double total = 0.0;
    while (true) {
        double w = 1.0;
        for (std::size_t k = 0; k < dim; ++k) {
            x[k] = box[k].first + idx[k] * h[k];
            w *= (idx[k] == 0 || idx[k] == m - 1) ? 0.5 * h[k] : h[k];
        }
        total += w * f(x);
        std::size_t k = 0;
        while (k < dim && ++idx[k] == m) idx[k++] = 0;
        if (k == dim) break;
    }
    return total;
}

/// sum of w(I) over subsets containing label `index`, by raw bit loop.
inline double oracle_existence(const std::vector<double>& dense, std::size_t index) {
    double r = 0.0;
    for (std::uint32_t m = 0; m < dense.size(); ++m) {
        if (m >> (index - 1) & 1u) r += dense[m];
    }
    return r;
}

/// Literal product form rho(n) = prod_j (1 - r_j) sum_{|I|=n} prod_{l in I} r_l / (1 - r_l).
inline std::vector<double> oracle_lmb_cardinality(const std::vector<double>& r) {
    const std::size_t L = r.size();
    double base = 1.0;
    for (double ri : r) base *= 1.0 - ri;
    std::vector<double> rho(L + 1, 0.0);
    for (std::uint32_t m = 0; m < (1u << L); ++m) {
        double prod = 1.0;
        std::size_t n = 0;
        for (std::size_t j = 0; j < L; ++j) {
            if (m >> j & 1u) {
                prod *= r[j] / (1.0 - r[j]);
                ++n;
            }
        }
        rho[n] += prod;
    }
    for (double& v : rho) v *= base;
    return rho;
}

inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, Eigen::Index n, double jitter = 0.3) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = normal(rng) * 0.8;
    Eigen::MatrixXd s = a * a.transpose() + jitter * Eigen::MatrixXd::Identity(n, n);
    return 0.5 * (s + s.transpose());
}

/// Random LMO density: random weights (some zeroed), random means in
/// [-4, 4] and random SPD conditionals.
inline LmoParameters random_lmo_parameters(std::uint64_t seed, std::size_t n_labels, std::size_t d = 1,
                                           double zero_prob = 0.2) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_real_distribution<double> loc(-4.0, 4.0);
    LmoParameters p;
    p.space = LabelSpace::numbered(n_labels);
    p.state_dim = d;
    p.weights.assign(p.space.subset_count(), 0.0);
    double total = 0.0;
    for (auto& w : p.weights) {
        w = unif(rng) < zero_prob ? 0.0 : 0.05 + unif(rng);
        total += w;
    }
    if (total == 0.0) {
        p.weights.back() = 1.0;
        total = 1.0;
    }
    for (auto& w : p.weights) w /= total;
    for (std::uint32_t m = 1; m < p.weights.size(); ++m) {
        if (p.weights[m] == 0.0) continue;
        const auto n = static_cast<Eigen::Index>(LabelSet(m).size() * d);
        RawConditional c;
        c.mean.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) c.mean[i] = loc(rng);
        c.cov = random_spd(rng, n);
        p.conditionals[m] = std::move(c);
    }
    return p;
}

/// LMO density that is exactly an LMB with single-Gaussian tracks.
inline LmoParameters lmb_form_parameters(const std::vector<double>& r, const std::vector<double>& means,
                                         const std::vector<double>& vars) {
    const std::size_t L = r.size();
    LmoParameters p;
    p.space = LabelSpace::numbered(L);
    p.state_dim = 1;
    p.weights.assign(p.space.subset_count(), 0.0);
    for (std::uint32_t m = 0; m < p.weights.size(); ++m) {
        double w = 1.0;
        for (std::size_t j = 0; j < L; ++j) w *= (m >> j & 1u) ? r[j] : 1.0 - r[j];
        p.weights[m] = w;
        if (m == 0 || w == 0.0) continue;
        const auto members = LabelSet(m).members();
        const auto n = static_cast<Eigen::Index>(members.size());
        RawConditional c{Eigen::VectorXd(n), Eigen::MatrixXd::Zero(n, n)};
        for (Eigen::Index i = 0; i < n; ++i) {
            c.mean[i] = means[members[static_cast<std::size_t>(i)].index - 1];
            c.cov(i, i) = vars[members[static_cast<std::size_t>(i)].index - 1];
        }
        p.conditionals[m] = std::move(c);
    }
    return p;
}

}  // namespace lmotest
