#pragma once

// JSON configuration documents for scenarios and toy training.
//
// Scenario documents are overlays: "scenario" selects the preset, every
// other key overrides one preset field. Plasticity parameters are flat keys
// (eta, gamma, critical_r, beta, ...). Unknown keys are rejected. A run
// manifest is itself a valid config source through its "config" member.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "json.hpp"

#include "hocl/error.hpp"
#include "hocl/model.hpp"
#include "hocl/scenarios.hpp"

namespace hocl {

using Json = nlohmann::ordered_json;

namespace detail {

inline const Json& require_number(const Json& doc, const std::string& key) {
    const Json& v = doc.at(key);
    if (!v.is_number()) throw ConfigError(key, "expected a number");
    return v;
}

inline double get_real(const Json& doc, const std::string& key) {
    return require_number(doc, key).get<double>();
}

inline double get_positive(const Json& doc, const std::string& key) {
    const double v = get_real(doc, key);
    if (!(v > 0.0)) throw ConfigError(key, "must be > 0");
    return v;
}

inline double get_nonnegative(const Json& doc, const std::string& key) {
    const double v = get_real(doc, key);
    if (!(v >= 0.0)) throw ConfigError(key, "must be >= 0");
    return v;
}

inline std::uint64_t get_count(const Json& doc, const std::string& key) {
    const Json& v = doc.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw ConfigError(key, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

inline bool get_bool(const Json& doc, const std::string& key) {
    const Json& v = doc.at(key);
    if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
    return v.get<bool>();
}

inline std::string get_string(const Json& doc, const std::string& key) {
    const Json& v = doc.at(key);
    if (!v.is_string()) throw ConfigError(key, "expected a string");
    return v.get<std::string>();
}

inline const char* gate_mode_name(GateMode m) { return m == GateMode::Hard ? "hard" : "smooth"; }

inline GateMode parse_gate_mode(const Json& doc, const std::string& key) {
    const std::string s = get_string(doc, key);
    if (s == "hard") return GateMode::Hard;
    if (s == "smooth") return GateMode::Smooth;
    throw ConfigError(key, "expected \"hard\" or \"smooth\"");
}

inline CouplingVariant parse_variant(const Json& doc, const std::string& key) {
    const std::string s = get_string(doc, key);
    for (CouplingVariant v : {CouplingVariant::MeanFieldClassical, CouplingVariant::OrderGatedKernel,
                              CouplingVariant::SparseLocal}) {
        if (s == to_string(v)) return v;
    }
    throw ConfigError(key, "unknown coupling variant '" + s + "'");
}

inline const char* activation_name(ActivationModel a) {
    return a == ActivationModel::SparseGaussian ? "sparse_gaussian" : "phase_cosine";
}

inline const char* nonlinearity_name(Nonlinearity f) { return f == Nonlinearity::ReLU ? "relu" : "identity"; }

// Plasticity keys shared by both document kinds.
inline void read_plasticity(const Json& doc, const std::string& key, PlasticityParams& p) {
    if (key == "eta") p.eta = get_nonnegative(doc, key);
    else if (key == "gamma") p.gamma = get_positive(doc, key);
    else if (key == "critical_r") {
        p.critical_r = get_real(doc, key);
        if (!(p.critical_r > 0.0 && p.critical_r < 1.0)) throw ConfigError(key, "must be in (0, 1)");
    } else if (key == "beta") p.sharpness = get_positive(doc, key);
    else if (key == "gate_mode") p.gate_mode = parse_gate_mode(doc, key);
    else if (key == "activation_bound") p.activation_bound = get_positive(doc, key);
    else if (key == "decay_everywhere") p.decay_everywhere = get_bool(doc, key);
    else throw ConfigError(key, "unknown field");
}

inline bool is_plasticity_key(const std::string& key) {
    return key == "eta" || key == "gamma" || key == "critical_r" || key == "beta" || key == "gate_mode" ||
           key == "activation_bound" || key == "decay_everywhere";
}

inline void write_plasticity(Json& doc, const PlasticityParams& p) {
    doc["eta"] = p.eta;
    doc["gamma"] = p.gamma;
    doc["critical_r"] = p.critical_r;
    doc["beta"] = p.sharpness;
    doc["gate_mode"] = gate_mode_name(p.gate_mode);
    doc["activation_bound"] = p.activation_bound;
    doc["decay_everywhere"] = p.decay_everywhere;
}

// A manifest carries the resolved config under "config".
inline const Json& config_body(const Json& doc) {
    if (!doc.is_object()) throw ConfigError("<document>", "expected a JSON object");
    if (doc.contains("config")) {
        const Json& body = doc.at("config");
        if (!body.is_object()) throw ConfigError("config", "expected a JSON object");
        return body;
    }
    return doc;
}

inline FrequencySpec parse_frequencies(const Json& f) {
    if (!f.is_object()) throw ConfigError("frequencies", "expected a JSON object");
    FrequencySpec s;
    const std::string kind = f.contains("kind") ? get_string(f, "kind") : "normal";
    for (const auto& [key, _] : f.items()) {
        if (key == "kind") continue;
        const std::string path = "frequencies." + key;
        try {
            if (key == "mean") s.mean = get_real(f, key);
            else if (key == "stddev") s.stddev = get_nonnegative(f, key);
            else if (key == "count") s.count = get_count(f, key);
            else if (key == "mean2") s.mean2 = get_real(f, key);
            else if (key == "stddev2") s.stddev2 = get_nonnegative(f, key);
            else if (key == "count2") s.count2 = get_count(f, key);
            else throw ConfigError(key, "unknown field");
        } catch (const ConfigError& e) {
            throw ConfigError(path, e.what());
        }
    }
    if (kind == "normal") s.kind = FrequencySpec::Kind::Normal;
    else if (kind == "two_cluster") s.kind = FrequencySpec::Kind::TwoCluster;
    else throw ConfigError("frequencies.kind", "expected \"normal\" or \"two_cluster\"");
    return s;
}

}  // namespace detail

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return Json::parse(buf.str());
    } catch (const Json::parse_error& e) {
        throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
    }
}

inline Json to_json(const ScenarioConfig& c) {
    Json j;
    j["scenario"] = scenario_name(c.id);
    j["n"] = c.n;
    j["dt"] = c.dt;
    j["steps"] = c.steps;
    j["coupling"] = c.coupling;
    j["kernel_bandwidth"] = c.kernel_bandwidth;
    j["variant"] = to_string(c.variant);
    Json f;
    const bool two = c.frequencies.kind == FrequencySpec::Kind::TwoCluster;
    f["kind"] = two ? "two_cluster" : "normal";
    f["mean"] = c.frequencies.mean;
    f["stddev"] = c.frequencies.stddev;
    if (two) {
        f["count"] = c.frequencies.count;
        f["mean2"] = c.frequencies.mean2;
        f["stddev2"] = c.frequencies.stddev2;
        f["count2"] = c.frequencies.count2;
    }
    j["frequencies"] = f;
    j["centered"] = c.centered;
    detail::write_plasticity(j, c.plasticity);
    j["lyapunov_weight"] = c.lyapunov_weight;
    j["activations"] = detail::activation_name(c.activations);
    j["activation_density"] = c.activation_density;
    j["activation_stddev"] = c.activation_stddev;
    j["initial_weight_stddev"] = c.initial_weight_stddev;
    j["trajectories"] = c.trajectories;
    j["average_window"] = c.average_window;
    j["cluster_cut"] = c.cluster_cut;
    j["burn_in"] = c.burn_in;
    j["seed"] = c.seed;
    return j;
}

/// Scenario config from a document (or manifest). `fallback` picks the
/// preset when the document has no "scenario" key.
inline ScenarioConfig scenario_config_from_json(const Json& doc, std::optional<ScenarioId> fallback = std::nullopt) {
    using namespace detail;
    const Json& body = config_body(doc);
    std::optional<ScenarioId> id = fallback;
    if (body.contains("scenario")) {
        id = parse_scenario(get_string(body, "scenario"));
        if (!id || *id == ScenarioId::ToyTraining) throw ConfigError("scenario", "expected fig2, fig3 or fig4");
    }
    if (!id) throw ConfigError("scenario", "missing");
    ScenarioConfig c = scenario_preset(*id);
    for (const auto& [key, _] : body.items()) {
        if (key == "scenario") continue;
        else if (key == "n") c.n = get_count(body, key);
        else if (key == "dt") c.dt = get_positive(body, key);
        else if (key == "steps") c.steps = get_count(body, key);
        else if (key == "coupling") c.coupling = get_positive(body, key);
        else if (key == "kernel_bandwidth") c.kernel_bandwidth = get_positive(body, key);
        else if (key == "variant") c.variant = parse_variant(body, key);
        else if (key == "frequencies") c.frequencies = parse_frequencies(body.at(key));
        else if (key == "centered") c.centered = get_bool(body, key);
        else if (is_plasticity_key(key)) read_plasticity(body, key, c.plasticity);
        else if (key == "lyapunov_weight") c.lyapunov_weight = get_positive(body, key);
        else if (key == "activations") {
            const std::string s = get_string(body, key);
            if (s == "sparse_gaussian") c.activations = ActivationModel::SparseGaussian;
            else if (s == "phase_cosine") c.activations = ActivationModel::PhaseCosine;
            else throw ConfigError(key, "expected \"sparse_gaussian\" or \"phase_cosine\"");
        } else if (key == "activation_density") c.activation_density = get_nonnegative(body, key);
        else if (key == "activation_stddev") c.activation_stddev = get_nonnegative(body, key);
        else if (key == "initial_weight_stddev") c.initial_weight_stddev = get_nonnegative(body, key);
        else if (key == "trajectories") c.trajectories = get_count(body, key);
        else if (key == "average_window") c.average_window = get_count(body, key);
        else if (key == "cluster_cut") c.cluster_cut = get_positive(body, key);
        else if (key == "burn_in") c.burn_in = get_count(body, key);
        else if (key == "seed") c.seed = get_count(body, key);
        else throw ConfigError(key, "unknown field");
    }
    if (c.n == 0) throw ConfigError("n", "must be >= 1");
    if (c.steps == 0) throw ConfigError("steps", "must be >= 1");
    if (c.trajectories == 0) throw ConfigError("trajectories", "must be >= 1");
    if (c.average_window == 0) throw ConfigError("average_window", "must be >= 1");
    if (c.activation_density > 1.0) throw ConfigError("activation_density", "must be in [0, 1]");
    if (c.cluster_cut > std::numbers::pi) throw ConfigError("cluster_cut", "must be in (0, pi]");
    if (c.frequencies.kind == FrequencySpec::Kind::TwoCluster && c.frequencies.count + c.frequencies.count2 != c.n) {
        throw ConfigError("frequencies", "cluster sizes must sum to n");
    }
    c.validate();
    return c;
}

inline Json to_json(const ToyConfig& c) {
    Json j;
    j["units"] = c.units;
    j["dim"] = c.dim;
    j["input_dim"] = c.input_dim;
    j["coupling"] = c.coupling;
    j["kernel_bandwidth"] = c.kernel_bandwidth;
    j["frequency_stddev"] = c.frequency_stddev;
    detail::write_plasticity(j, c.plasticity);
    j["delta"] = c.delta ? Json(*c.delta) : Json(nullptr);
    j["target_density"] = c.target_density;
    j["k_cap"] = c.k_cap ? Json(*c.k_cap) : Json(nullptr);
    j["sync_steps"] = c.sync_steps;
    j["dt"] = c.dt;
    j["alpha_fast"] = c.alpha_fast;
    j["alpha_slow"] = c.alpha_slow;
    j["alpha_embed"] = c.alpha_embed;
    j["lyapunov_weight"] = c.lyapunov_weight;
    j["nonlinearity"] = detail::nonlinearity_name(c.nonlinearity);
    j["fd_step"] = c.fd_step;
    j["max_iters"] = c.max_iters;
    j["eps_conv"] = c.eps_conv;
    j["embedding_stddev"] = c.embedding_stddev;
    j["projection_stddev"] = c.projection_stddev;
    j["readout_stddev"] = c.readout_stddev;
    j["initial_weight_low"] = c.initial_weight_low;
    j["initial_weight_high"] = c.initial_weight_high;
    j["seed"] = c.seed;
    return j;
}

inline ToyConfig toy_config_from_json(const Json& doc) {
    using namespace detail;
    const Json& body = config_body(doc);
    ToyConfig c;
    for (const auto& [key, value] : body.items()) {
        if (key == "units") c.units = get_count(body, key);
        else if (key == "dim") c.dim = get_count(body, key);
        else if (key == "input_dim") c.input_dim = get_count(body, key);
        else if (key == "coupling") c.coupling = get_positive(body, key);
        else if (key == "kernel_bandwidth") c.kernel_bandwidth = get_positive(body, key);
        else if (key == "frequency_stddev") c.frequency_stddev = get_nonnegative(body, key);
        else if (is_plasticity_key(key)) read_plasticity(body, key, c.plasticity);
        else if (key == "delta") c.delta = value.is_null() ? std::nullopt : std::optional<double>(get_positive(body, key));
        else if (key == "target_density") {
            c.target_density = get_positive(body, key);
            if (c.target_density > 1.0) throw ConfigError(key, "must be in (0, 1]");
        } else if (key == "k_cap") {
            if (value.is_null()) c.k_cap.reset();
            else {
                c.k_cap = get_count(body, key);
                if (*c.k_cap == 0) throw ConfigError(key, "must be >= 1");
            }
        } else if (key == "sync_steps") {
            c.sync_steps = get_count(body, key);
            if (c.sync_steps == 0) throw ConfigError(key, "must be >= 1");
        } else if (key == "dt") c.dt = get_positive(body, key);
        else if (key == "alpha_fast") c.alpha_fast = get_nonnegative(body, key);
        else if (key == "alpha_slow") c.alpha_slow = get_nonnegative(body, key);
        else if (key == "alpha_embed") c.alpha_embed = get_nonnegative(body, key);
        else if (key == "lyapunov_weight") c.lyapunov_weight = get_positive(body, key);
        else if (key == "nonlinearity") {
            const std::string s = get_string(body, key);
            if (s == "relu") c.nonlinearity = Nonlinearity::ReLU;
            else if (s == "identity") c.nonlinearity = Nonlinearity::Identity;
            else throw ConfigError(key, "expected \"relu\" or \"identity\"");
        } else if (key == "fd_step") c.fd_step = get_positive(body, key);
        else if (key == "max_iters") {
            c.max_iters = get_count(body, key);
            if (c.max_iters == 0) throw ConfigError(key, "must be >= 1");
        } else if (key == "eps_conv") c.eps_conv = get_positive(body, key);
        else if (key == "embedding_stddev") c.embedding_stddev = get_nonnegative(body, key);
        else if (key == "projection_stddev") c.projection_stddev = get_nonnegative(body, key);
        else if (key == "readout_stddev") c.readout_stddev = get_nonnegative(body, key);
        else if (key == "initial_weight_low") c.initial_weight_low = get_real(body, key);
        else if (key == "initial_weight_high") c.initial_weight_high = get_real(body, key);
        else if (key == "seed") c.seed = get_count(body, key);
        else throw ConfigError(key, "unknown field");
    }
    if (c.units < 2) throw ConfigError("units", "must be >= 2");
    if (c.dim == 0) throw ConfigError("dim", "must be >= 1");
    if (c.input_dim == 0) throw ConfigError("input_dim", "must be >= 1");
    if (!(c.initial_weight_low <= c.initial_weight_high)) {
        throw ConfigError("initial_weight_high", "must be >= initial_weight_low");
    }
    return c;
}

}  // namespace hocl
