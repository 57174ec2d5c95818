#include "lmoapprox/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "lmoapprox/approx.hpp"
#include "lmoapprox/errors.hpp"

namespace lmoapprox {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // also folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

namespace {

std::string provenance(const std::string& hash, const ReportOptions& o) {
    std::ostringstream os;
    os << "# spec_hash=" << hash << " seed=" << o.kld.seed << " kld_grid=" << o.kld.points_low_dim << '/'
       << o.kld.points_3d << " kld_width=" << format_number(o.kld.width) << " mc_samples=" << o.kld.mc_samples
       << " phd_grid=[" << format_number(o.phd_lo) << ',' << format_number(o.phd_hi) << "]x" << o.phd_points
       << '\n';
    return os.str();
}

struct KldRow {
    std::string name;
    std::optional<KLDEstimate> direct;
    KLDDecomposition decomposition;
};

}  // namespace

ReportBundle build_report(const DensitySpec& spec, const ReportOptions& options) {
    const auto decoded = decode_spec(spec);
    if (!decoded.report.ok()) throw ValidationError("invalid density spec:\n" + decoded.report.format());
    const LMODensity pi(decoded.params);
    const auto& space = pi.space();
    const std::size_t L = space.size();

    ReportBundle bundle;
    bundle.spec_hash = spec_hash(spec);
    const std::string header = provenance(bundle.spec_hash, options);

    const auto rho = cardinality_from_weights(pi.weights());
    const auto dglmb = approx_delta_glmb(pi);
    const auto lmb = approx_lmb(pi);
    const auto liid = approx_liid(pi);
    std::optional<LPDensity> lp;
    if (!liid.degenerate()) lp = approx_lp(pi);
    const auto rho_dglmb = dglmb.cardinality();
    const auto rho_lmb = lmb_cardinality(lmb);
    const auto& rho_liid = liid.rho();

    std::ostringstream notes;
    notes << header;
    notes << "labels: " << L << ", state_dim: " << pi.state_dim() << '\n';
    notes << "validation: ok\n";
    for (const auto& r : decoded.repairs) {
        notes << "pd repair: covariance of " << space.format(r.subset) << " had min eigenvalue "
              << format_number(r.min_eigenvalue_before) << "; eigenvalues clamped at " << format_number(r.floor)
              << " (Frobenius change " << format_number(r.frobenius_change) << ")\n";
    }
    notes << "mean cardinality: " << format_number(mean_cardinality(rho)) << '\n';

    // cardinality.csv
    {
        std::ostringstream os;
        os << header;
        if (lp) {
            const auto pois = lp->cardinality();
            double mass = 0.0;
            for (std::size_t n = 0; n <= L; ++n) mass += pois[n];
            os << "# rho_pois holds Poisson(" << format_number(lp->rate()) << ") mass for n <= " << L
               << ", summing to " << format_number(mass) << '\n';
        } else {
            os << "# rho_pois undefined: expected cardinality is 0\n";
        }
        os << "n,rho,rho_dglmb,rho_liid,rho_lmb,rho_pois\n";
        for (std::size_t n = 0; n <= L; ++n) {
            os << n << ',' << format_number(rho[n]) << ',' << format_number(rho_dglmb[n]) << ','
               << format_number(rho_liid[n]) << ',' << format_number(rho_lmb[n]) << ','
               << (lp ? format_number(poisson_pmf(lp->rate(), n)) : std::string("nan")) << '\n';
        }
        bundle.files["cardinality.csv"] = os.str();
    }

    // tracks.csv
    {
        std::ostringstream os;
        os << header << "label,r,components,alpha_liid,alpha_lp\n";
        for (Label l : space.labels()) {
            const auto& t = lmb.track(l);
            os << space.name(l) << ',' << format_number(t.r) << ',' << t.p.size() << ','
               << format_number(liid_alpha(liid, l)) << ','
               << (lp ? format_number(lp_alpha(*lp, l)) : std::string("nan")) << '\n';
        }
        bundle.files["tracks.csv"] = os.str();
    }

    // phd.csv
    if (pi.state_dim() == 1) {
        std::ostringstream os;
        os << header << 'x';
        for (Label l : space.labels()) os << ",v_" << space.name(l);
        os << ",v,v_lp\n";
        std::vector<GaussianMixture> per_label;
        for (Label l : space.labels()) per_label.push_back(labeled_phd(pi, l));
        const auto pooled = unlabeled_phd(pi);
        const auto lp_phd = lp ? lp_unlabeled_phd(*lp) : GaussianMixture(1);
        const std::size_t m = std::max<std::size_t>(options.phd_points, 2);
        for (std::size_t i = 0; i < m; ++i) {
            const double x = options.phd_lo + (options.phd_hi - options.phd_lo) * static_cast<double>(i) /
                                                  static_cast<double>(m - 1);
            const double xs[1] = {x};
            os << format_number(x);
            for (const auto& v : per_label) os << ',' << format_number(v.evaluate(xs));
            os << ',' << format_number(pooled.evaluate(xs)) << ',' << format_number(lp_phd.evaluate(xs)) << '\n';
        }
        bundle.files["phd.csv"] = os.str();
    } else {
        notes << "phd.csv skipped: PHD curves are written for state_dim = 1 only\n";
    }

    // kld.csv
    if (!options.skip_kld) {
        std::vector<KldRow> rows;
        auto add = [&](const std::string& name, const FactorizedDensity& g) {
            rows.push_back({name, kld(pi, g, options.kld), kld_decompose(pi, g, options.kld)});
        };
        add("delta-GLMB", dglmb);
        add("LMB", lmb);
        if (lp) add("LP", *lp);
        if (!liid.degenerate()) add("LIID", liid);

        std::ostringstream os;
        os << header << "approximation,kld,error_bound,method,c_omega,c_p,c_p_error,decomposition_total,infinite_stratum\n";
        for (const auto& r : rows) {
            const auto& k = *r.direct;
            os << r.name << ',' << format_number(k.value) << ',' << format_number(k.error_bound) << ','
               << to_string(k.method) << ',' << format_number(r.decomposition.c_omega) << ','
               << format_number(r.decomposition.c_p) << ',' << format_number(r.decomposition.error_bound) << ','
               << format_number(r.decomposition.total) << ','
               << (k.infinite_stratum ? space.format(*k.infinite_stratum) : std::string("-")) << '\n';
        }
        bundle.files["kld.csv"] = os.str();

        notes << "C(P_hat) by approximation:";
        for (const auto& r : rows) notes << ' ' << r.name << '=' << format_number(r.decomposition.c_p);
        notes << '\n';
        const auto py = pythagorean_residual(pi, options.kld);
        notes << "pythagorean check: D(pi;LMB)=" << format_number(py.pi_lmb.value)
              << " D(pi;dGLMB)=" << format_number(py.pi_dglmb.value)
              << " D(dGLMB;LMB)=" << format_number(py.dglmb_lmb.value) << " residual=" << format_number(py.residual)
              << " bound=" << format_number(py.error_bound) << '\n';
    } else {
        notes << "kld.csv skipped (--skip-kld)\n";
    }

    // cost.csv
    {
        std::ostringstream os;
        os << header << "density";
        for (std::size_t k = 1; k <= L; ++k) os << ",X^" << k;
        os << ",total\n";
        for (auto kind : {DensityKind::lmo, DensityKind::delta_glmb, DensityKind::lmb, DensityKind::lp,
                          DensityKind::liid}) {
            const auto c = integral_cost(kind, L);
            os << to_string(kind);
            for (auto v : c.integrals) os << ',' << v;
            os << ',' << c.total() << '\n';
        }
        bundle.files["cost.csv"] = os.str();
    }

    bundle.files["notes.txt"] = notes.str();
    return bundle;
}

void write_bundle(const ReportBundle& bundle, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    for (const auto& [name, content] : bundle.files) {
        std::ofstream out(out_dir / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + (out_dir / name).string() + "'");
        out << content;
    }
}

}  // namespace lmoapprox
