#include "lmoapprox/spec_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lmoapprox/errors.hpp"

namespace lmoapprox {

using nlohmann::json;

namespace {

std::string label_name(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw SpecError("label names must be strings or integers");
}

std::vector<double> number_list(const json& j, const std::string& what) {
    if (!j.is_array()) throw SpecError(what + " must be an array");
    std::vector<double> out;
    for (const auto& v : j) {
        if (v.is_array()) {
            for (const auto& e : v) {
                if (!e.is_number()) throw SpecError(what + " entries must be numbers");
                out.push_back(e.get<double>());
            }
        } else if (v.is_number()) {
            out.push_back(v.get<double>());
        } else {
            throw SpecError(what + " entries must be numbers");
        }
    }
    return out;
}

json to_json(const DensitySpec& spec) {
    json j;
    j["state_dim"] = spec.state_dim;
    j["labels"] = spec.labels;
    json hyps = json::array();
    for (const auto& h : spec.hypotheses) {
        json jh;
        jh["labels"] = h.labels;
        jh["weight"] = h.weight;
        if (!h.labels.empty() || !h.mean.empty()) {
            jh["mean"] = h.mean;
            const std::size_t n = h.mean.size();
            json rows = json::array();
            if (n > 0 && h.cov.size() == n * n) {
                for (std::size_t r = 0; r < n; ++r) {
                    rows.push_back(std::vector<double>(h.cov.begin() + static_cast<std::ptrdiff_t>(r * n),
                                                       h.cov.begin() + static_cast<std::ptrdiff_t>((r + 1) * n)));
                }
            } else {
                rows = h.cov;
            }
            jh["cov"] = rows;
        }
        hyps.push_back(std::move(jh));
    }
    j["hypotheses"] = std::move(hyps);
    j["options"] = {{"renormalize", spec.options.renormalize},
                    {"fix_pd", spec.options.fix_pd},
                    {"pd_floor_ratio", spec.options.pd_floor_ratio}};
    return j;
}

}  // namespace

DensitySpec parse_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SpecError(std::string("JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw SpecError("spec must be a JSON object");
    DensitySpec spec;
    try {
        if (j.contains("state_dim")) {
            const auto& d = j.at("state_dim");
            if (!d.is_number_unsigned() || d.get<std::size_t>() == 0) throw SpecError("state_dim must be a positive integer");
            spec.state_dim = d.get<std::size_t>();
        }
        if (!j.contains("labels") || !j.at("labels").is_array()) throw SpecError("missing 'labels' array");
        for (const auto& l : j.at("labels")) spec.labels.push_back(label_name(l));
        if (!j.contains("hypotheses") || !j.at("hypotheses").is_array()) throw SpecError("missing 'hypotheses' array");
        std::size_t index = 0;
        for (const auto& jh : j.at("hypotheses")) {
            const std::string where = "hypotheses[" + std::to_string(index++) + "]";
            if (!jh.is_object()) throw SpecError(where + " must be an object");
            HypothesisSpec h;
            if (!jh.contains("labels") || !jh.at("labels").is_array()) throw SpecError(where + " needs a 'labels' array");
            for (const auto& l : jh.at("labels")) h.labels.push_back(label_name(l));
            if (!jh.contains("weight") || !jh.at("weight").is_number()) throw SpecError(where + " needs a numeric 'weight'");
            h.weight = jh.at("weight").get<double>();
            if (jh.contains("mean")) h.mean = number_list(jh.at("mean"), where + ".mean");
            if (jh.contains("cov")) h.cov = number_list(jh.at("cov"), where + ".cov");
            if (!h.labels.empty() && (!jh.contains("mean") || !jh.contains("cov"))) {
                throw SpecError(where + " needs 'mean' and 'cov'");
            }
            spec.hypotheses.push_back(std::move(h));
        }
        if (j.contains("options")) {
            const auto& o = j.at("options");
            if (!o.is_object()) throw SpecError("'options' must be an object");
            if (o.contains("renormalize")) spec.options.renormalize = o.at("renormalize").get<bool>();
            if (o.contains("fix_pd")) spec.options.fix_pd = o.at("fix_pd").get<bool>();
            if (o.contains("pd_floor_ratio")) spec.options.pd_floor_ratio = o.at("pd_floor_ratio").get<double>();
        }
    } catch (const json::exception& e) {
        throw SpecError(std::string("schema error: ") + e.what());
    }
    return spec;
}

DensitySpec read_spec(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecError("cannot read spec file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_spec(ss.str());
}

std::string write_spec(const DensitySpec& spec) { return to_json(spec).dump(2) + "\n"; }

void save_spec(const DensitySpec& spec, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SpecError("cannot write spec file '" + path.string() + "'");
    out << write_spec(spec);
}

std::string spec_hash(const DensitySpec& spec) {
    const std::string canonical = to_json(spec).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

DecodedSpec decode_spec(const DensitySpec& spec) {
    DecodedSpec out;
    auto& p = out.params;
    try {
        p.space = LabelSpace(spec.labels);
    } catch (const DomainError& e) {
        throw SpecError(e.what());
    }
    if (spec.state_dim == 0) throw SpecError("state_dim must be positive");
    p.state_dim = spec.state_dim;
    p.weights.assign(p.space.subset_count(), 0.0);
    std::vector<bool> seen(p.space.subset_count(), false);
    const std::size_t d = spec.state_dim;

    for (const auto& h : spec.hypotheses) {
        std::vector<Label> labels;
        for (const auto& name : h.labels) {
            try {
                labels.push_back(p.space.find(name));
            } catch (const DomainError& e) {
                throw SpecError(e.what());
            }
        }
        LabelSet set;
        try {
            set = LabelSet::from_labels(labels);
        } catch (const DomainError& e) {
            throw SpecError(std::string("hypothesis labels: ") + e.what());
        }
        if (seen[set.mask()]) throw SpecError("duplicate hypothesis for label set " + p.space.format(set));
        seen[set.mask()] = true;
        p.weights[set.mask()] = h.weight;
        if (set.empty()) {
            if (!h.mean.empty() || !h.cov.empty()) throw SpecError("the empty label set takes no mean or covariance");
            continue;
        }

        const std::size_t n = labels.size() * d;
        RawConditional c;
        if (h.mean.size() != n || h.cov.size() != n * n) {
            // Leave the shape error for the validator to report.
            c.mean = Eigen::Map<const Eigen::VectorXd>(h.mean.data(), static_cast<Eigen::Index>(h.mean.size()));
            c.cov = Eigen::MatrixXd(0, 0);
            p.conditionals[set.mask()] = std::move(c);
            continue;
        }
        // Coordinate permutation from the written order to canonical order.
        std::vector<std::size_t> order(labels.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
        std::vector<Eigen::Index> src;
        for (std::size_t pos : order) {
            for (std::size_t k = 0; k < d; ++k) src.push_back(static_cast<Eigen::Index>(pos * d + k));
        }
        const auto N = static_cast<Eigen::Index>(n);
        c.mean.resize(N);
        c.cov.resize(N, N);
        for (Eigen::Index i = 0; i < N; ++i) {
            c.mean[i] = h.mean[static_cast<std::size_t>(src[i])];
            for (Eigen::Index jx = 0; jx < N; ++jx) {
                c.cov(i, jx) = h.cov[static_cast<std::size_t>(src[i]) * n + static_cast<std::size_t>(src[jx])];
            }
        }
        p.conditionals[set.mask()] = std::move(c);
    }

    if (spec.options.renormalize) {
        const double total = std::accumulate(p.weights.begin(), p.weights.end(), 0.0);
        if (total > 0.0 && std::isfinite(total)) {
            for (double& w : p.weights) w /= total;
        }
    }
    if (spec.options.fix_pd) {
        if (!(spec.options.pd_floor_ratio > 0.0)) throw SpecError("pd_floor_ratio must be positive");
        out.repairs = repair_covariances(p, spec.options.pd_floor_ratio);
    }
    out.report = validate(p);
    return out;
}

DensitySpec encode_spec(const LmoParameters& params, const SpecOptions& options) {
    DensitySpec spec;
    spec.state_dim = params.state_dim;
    spec.labels = params.space.names();
    spec.options = options;
    for (LabelSet s : enumerate_subsets(params.space)) {
        const double w = params.weights.at(s.mask());
        const auto it = params.conditionals.find(s.mask());
        if (w == 0.0 && it == params.conditionals.end()) continue;
        HypothesisSpec h;
        for (Label l : s.members()) h.labels.push_back(params.space.name(l));
        h.weight = w;
        if (it != params.conditionals.end()) {
            const auto& c = it->second;
            h.mean.assign(c.mean.data(), c.mean.data() + c.mean.size());
            for (Eigen::Index r = 0; r < c.cov.rows(); ++r) {
                for (Eigen::Index col = 0; col < c.cov.cols(); ++col) h.cov.push_back(c.cov(r, col));
            }
        }
        spec.hypotheses.push_back(std::move(h));
    }
    return spec;
}

DensitySpec paper_example() {
    DensitySpec s;
    s.state_dim = 1;
    s.labels = {"1", "2", "3"};
    s.options.fix_pd = true;
    s.options.pd_floor_ratio = kDefaultPdFloorRatio;
    s.hypotheses = {
        {{}, 0.01, {}, {}},
        {{"1"}, 0.01, {1.0}, {1.0}},
        {{"2"}, 0.01, {2.0}, {2.0}},
        {{"3"}, 0.09, {8.0}, {3.0}},
        {{"1", "2"}, 0.07, {1.1, 2.1}, {1.2, 1.0, 1.0, 2.2}},
        {{"1", "3"}, 0.09, {1.1, 8.1}, {1.1, 1.0, 1.0, 1.2}},
        {{"2", "3"}, 0.09, {2.2, 8.1}, {2.1, 1.0, 1.0, 1.2}},
        {{"1", "2", "3"}, 0.63, {1.2, 2.2, 8.2}, {1.2, 2.0, 1.0, 2.0, 2.2, 1.0, 1.0, 1.0, 1.2}},
    };
    return s;
}

std::vector<std::string> example_names() { return {"paper"}; }

DensitySpec example_by_name(const std::string& name) {
    if (name == "paper") return paper_example();
    throw SpecError("unknown example '" + name + "' (known: paper)");
}

}  // namespace lmoapprox
