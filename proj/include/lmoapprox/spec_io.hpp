#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmoapprox/lmo.hpp"

namespace lmoapprox {

/// Malformed or unreadable density spec document.
class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SpecOptions {
    bool renormalize = false;
    bool fix_pd = false;
    double pd_floor_ratio = kDefaultPdFloorRatio;
};

struct HypothesisSpec {
    std::vector<std::string> labels;  // as written; may be out of canonical order
    double weight = 0.0;
    std::vector<double> mean;
    std::vector<double> cov;  // row-major
};

/// In-memory form of the JSON density document.
struct DensitySpec {
    std::size_t state_dim = 1;
    std::vector<std::string> labels;
    std::vector<HypothesisSpec> hypotheses;
    SpecOptions options;
};

/// Throws SpecError with a diagnostic on malformed JSON or schema errors.
DensitySpec parse_spec(const std::string& json_text);
DensitySpec read_spec(const std::filesystem::path& path);
/// Pretty-printed JSON, LF line endings, trailing newline.
std::string write_spec(const DensitySpec& spec);
void save_spec(const DensitySpec& spec, const std::filesystem::path& path);

/// FNV-1a 64-bit hash of the canonical compact JSON form, as 16 hex digits.
std::string spec_hash(const DensitySpec& spec);

struct DecodedSpec {
    LmoParameters params;
    std::vector<PdRepair> repairs;  // non-empty only with fix_pd
    ValidationReport report;        // of params after any repair
};

/// Maps names to canonical labels, permutes each hypothesis into
/// canonical coordinate order, applies renormalize and fix_pd, then
/// validates. Throws SpecError for structural problems (unknown or
/// duplicate labels, duplicate hypotheses, wrong state dimension).
DecodedSpec decode_spec(const DensitySpec& spec);

/// Spec document for an LMO parameter set (canonical order).
DensitySpec encode_spec(const LmoParameters& params, const SpecOptions& options = {});

/// The three-label scalar example with raw (non-PD) R_123; fix_pd = true.
DensitySpec paper_example();

/// Names accepted by `example`.
std::vector<std::string> example_names();
DensitySpec example_by_name(const std::string& name);

}  // namespace lmoapprox
