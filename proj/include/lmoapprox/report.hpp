#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>

#include "lmoapprox/divergence.hpp"
#include "lmoapprox/spec_io.hpp"

namespace lmoapprox {

struct ReportOptions {
    KldConfig kld;
    bool skip_kld = false;
    /// 1-D grid for the PHD curves (state_dim = 1 only).
    double phd_lo = -10.0;
    double phd_hi = 26.0;
    std::size_t phd_points = 721;
};

/// Report files keyed by file name. Contents are deterministic for a
/// given spec, options and seed.
struct ReportBundle {
    std::string spec_hash;
    std::map<std::string, std::string> files;
};

/// Six significant digits; "inf"/"-inf"/"nan" for non-finite values.
std::string format_number(double v);

/// Builds cardinality.csv, tracks.csv, phd.csv (state_dim = 1),
/// kld.csv, cost.csv and notes.txt. Throws ValidationError if the
/// decoded spec does not validate and NumericalRefusal if a KLD stratum
/// needs Monte Carlo while it is disabled.
ReportBundle build_report(const DensitySpec& spec, const ReportOptions& options = {});

void write_bundle(const ReportBundle& bundle, const std::filesystem::path& out_dir);

}  // namespace lmoapprox
