// lmo-approx: validate LMO density specs, write approximation reports,
// and emit bundled examples.
//
// Exit codes: 0 clean, 1 validation failure, 2 usage or I/O error,
// 3 numerical refusal.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lmoapprox/errors.hpp"
#include "lmoapprox/quadrature.hpp"
#include "lmoapprox/report.hpp"
#include "lmoapprox/spec_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRefused = 3;

void apply_thread_cap() {
    if (const char* env = std::getenv("LMO_APPROX_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) lmoapprox::set_worker_threads(n);
        } catch (const std::exception&) {
            std::cerr << "warning: ignoring invalid LMO_APPROX_THREADS='" << env << "'\n";
        }
    }
}

int run_validate(const std::string& path, std::optional<bool> fix_pd) {
    using namespace lmoapprox;
    auto spec = read_spec(path);
    if (fix_pd) spec.options.fix_pd = *fix_pd;
    const auto decoded = decode_spec(spec);
    std::cout << "spec_hash: " << spec_hash(spec) << '\n';
    for (const auto& r : decoded.repairs) {
        std::cout << "repair: covariance of " << decoded.params.space.format(r.subset)
                  << " replaced by nearest PD matrix (min eigenvalue " << format_number(r.min_eigenvalue_before)
                  << " -> " << format_number(r.floor) << ")\n";
    }
    std::cout << decoded.report.format();
    return decoded.report.ok() ? kExitOk : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace lmoapprox;
    apply_thread_cap();

    CLI::App app{"Labeled multi-object density approximations: delta-GLMB, LMB, LP, LIID"};
    app.require_subcommand(1);

    std::string spec_path;
    bool fix_pd_flag = false;
    bool no_fix_pd_flag = false;
    auto* validate = app.add_subcommand("validate", "Check a density spec and report every violation");
    validate->add_option("spec", spec_path, "Density spec (JSON)")->required();
    validate->add_flag("--fix-pd", fix_pd_flag, "Repair non-PD covariances (overrides the spec option)");
    validate->add_flag("--no-fix-pd", no_fix_pd_flag, "Do not repair covariances (overrides the spec option)");

    std::string out_dir = "report";
    ReportOptions ropt;
    bool no_mc = false;
    std::vector<double> phd_range;
    auto* report = app.add_subcommand("report", "Write cardinality, track, PHD, KLD and cost tables");
    report->add_option("spec", spec_path, "Density spec (JSON)")->required();
    report->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
    report->add_option("--grid-points", ropt.kld.points_low_dim, "KLD grid points per axis for 1-D/2-D strata")
        ->capture_default_str()
        ->check(CLI::Range(3, 100001));
    report->add_option("--grid-points-3d", ropt.kld.points_3d, "KLD grid points per axis for 3-D strata")
        ->capture_default_str()
        ->check(CLI::Range(3, 1001));
    report->add_option("--mc-samples", ropt.kld.mc_samples, "Monte Carlo samples per stratum above 3-D")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
    report->add_option("--seed", ropt.kld.seed, "Monte Carlo seed")->capture_default_str();
    report->add_flag("--skip-kld", ropt.skip_kld, "Skip the KLD section");
    report->add_flag("--no-mc", no_mc, "Refuse strata that need Monte Carlo");
    report->add_option("--phd-range", phd_range, "PHD curve grid bounds (lo hi)")->expected(2);
    report->add_option("--phd-points", ropt.phd_points, "PHD curve grid points")
        ->capture_default_str()
        ->check(CLI::Range(2, 1000001));

    std::string example_name;
    std::string example_out;
    auto* example = app.add_subcommand("example", "Write a bundled example density spec");
    example->add_option("name", example_name, "Example name (paper)")->required();
    example->add_option("-o,--out", example_out, "Output path (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*validate) {
            if (fix_pd_flag && no_fix_pd_flag) {
                std::cerr << "error: --fix-pd and --no-fix-pd are exclusive\n";
                return kExitUsage;
            }
            std::optional<bool> fix_pd;
            if (fix_pd_flag) fix_pd = true;
            if (no_fix_pd_flag) fix_pd = false;
            return run_validate(spec_path, fix_pd);
        }
        if (*report) {
            ropt.kld.allow_monte_carlo = !no_mc;
            if (!phd_range.empty()) {
                if (!(phd_range[0] < phd_range[1])) {
                    std::cerr << "error: --phd-range needs lo < hi\n";
                    return kExitUsage;
                }
                ropt.phd_lo = phd_range[0];
                ropt.phd_hi = phd_range[1];
            }
            const auto spec = read_spec(spec_path);
            const auto bundle = build_report(spec, ropt);
            write_bundle(bundle, out_dir);
            std::cout << "wrote " << bundle.files.size() << " files to " << out_dir << " (spec_hash "
                      << bundle.spec_hash << ")\n";
            return kExitOk;
        }
        if (*example) {
            const auto spec = example_by_name(example_name);
            if (example_out.empty()) {
                std::cout << write_spec(spec);
            } else {
                save_spec(spec, example_out);
            }
            return kExitOk;
        }
    } catch (const SpecError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what();
        return kExitInvalid;
    } catch (const NumericalRefusal& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return kExitRefused;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
