#include "aprobe/config.hpp"

#include <set>

#include <json.hpp>

namespace aprobe {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw ConfigError("unknown key '" + key + "' in " + where);
}

double get_num(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return obj[key].get<double>();
}

int get_int(const json& obj, const char* key, int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer())
        throw ConfigError(std::string("'") + key + "' must be an integer");
    return obj[key].get<int>();
}

cplx get_complex(const json& obj, const char* key, cplx fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj[key];
    if (v.is_number()) return cplx(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return cplx(v[0].get<double>(), v[1].get<double>());
    throw ConfigError(std::string("'") + key + "' must be a number or [re, im] pair");
}

std::vector<double> get_values(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty())
        throw ConfigError(where + " must be a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(where + " must contain only numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

ProtocolParams parse_params(const json& obj) {
    reject_unknown_keys(obj,
                        {"lambda", "gamma", "delta", "nbar", "alpha", "omega_m", "epsilon",
                         "dim_c", "dim_m", "trunc_tol", "amp_sq", "strict"},
                        "params");
    ProtocolParams p;
    p.lambda = get_num(obj, "lambda", p.lambda);
    p.gamma = get_num(obj, "gamma", p.gamma);
    p.delta = get_num(obj, "delta", p.delta);
    p.nbar = get_num(obj, "nbar", p.nbar);
    p.alpha = get_complex(obj, "alpha", p.alpha);
    p.omega_m = get_num(obj, "omega_m", p.omega_m);
    p.epsilon = get_num(obj, "epsilon", p.epsilon);
    p.dim_c = get_int(obj, "dim_c", p.dim_c);
    p.dim_m = get_int(obj, "dim_m", p.dim_m);
    p.trunc_tol = get_num(obj, "trunc_tol", p.trunc_tol);
    p.amp_sq = get_num(obj, "amp_sq", p.amp_sq);
    if (obj.contains("strict")) {
        if (!obj["strict"].is_boolean()) throw ConfigError("'strict' must be a boolean");
        p.strict = obj["strict"].get<bool>();
    }
    p.validate();
    return p;
}

MeasurementConfig parse_measurement(const json& obj) {
    reject_unknown_keys(obj,
                        {"scheme", "phi", "x_min", "x_max", "x_points", "eta_radius",
                         "eta_radial", "eta_angular"},
                        "measurement");
    MeasurementConfig cfg;
    if (obj.contains("scheme")) cfg.scheme = scheme_from_name(obj["scheme"].get<std::string>());
    cfg.phi = get_num(obj, "phi", cfg.phi);
    if (cfg.phi < 0.0 || cfg.phi >= 2.0 * kPi)
        throw ConfigError("measurement.phi must lie in [0, 2*pi)");
    cfg.x_grid.lo = get_num(obj, "x_min", 0.0);
    cfg.x_grid.hi = get_num(obj, "x_max", 0.0);
    cfg.x_grid.points = get_int(obj, "x_points", cfg.x_grid.points);
    cfg.eta_grid.radius = get_num(obj, "eta_radius", 0.0);
    cfg.eta_grid.radial = get_int(obj, "eta_radial", cfg.eta_grid.radial);
    cfg.eta_grid.angular = get_int(obj, "eta_angular", cfg.eta_grid.angular);
    return cfg;
}

const std::set<std::string> kSweepAxes{"np", "epsilon", "lambda", "gamma", "delta", "nbar"};

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"ratio-curve", "validate-map", "qfi-table",
                                                "estimate", "losses"};
    return names;
}

ExperimentConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown_keys(doc,
                        {"params", "measurement", "kind", "kinds", "sweep", "estimate",
                         "qfi_table", "output", "seed", "threads", "max_joint_dim"},
                        "config");

    ExperimentConfig cfg;
    if (doc.contains("params")) cfg.params = parse_params(doc["params"]);
    cfg.optimize_phi = true;
    if (doc.contains("measurement")) {
        cfg.measurement = parse_measurement(doc["measurement"]);
        cfg.optimize_phi = !doc["measurement"].contains("phi");
    }

    if (doc.contains("kind") && doc.contains("kinds"))
        throw ConfigError("give either 'kind' or 'kinds', not both");
    if (doc.contains("kind")) {
        const std::string name = doc["kind"].get<std::string>();
        if (name == "both")
            cfg.kinds = {Kind::quartic, Kind::cubic};
        else
            cfg.kinds = {kind_from_name(name)};
    } else if (doc.contains("kinds")) {
        cfg.kinds.clear();
        for (const auto& k : doc["kinds"]) cfg.kinds.push_back(kind_from_name(k.get<std::string>()));
        if (cfg.kinds.empty()) throw ConfigError("'kinds' must not be empty");
    }
    for (Kind k : cfg.kinds)
        if (k == Kind::harmonic)
            throw ConfigError("commands estimate anharmonicities; kind 'harmonic' is not allowed");

    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        reject_unknown_keys(s, {"parameter", "values"}, "sweep");
        if (!s.contains("parameter") || !s["parameter"].is_string())
            throw ConfigError("sweep.parameter must be a string");
        cfg.sweep.parameter = s["parameter"].get<std::string>();
        if (!kSweepAxes.count(cfg.sweep.parameter))
            throw ConfigError("sweep.parameter '" + cfg.sweep.parameter +
                              "' is not a recognized parameter field");
        if (!s.contains("values")) throw ConfigError("sweep.values is required");
        cfg.sweep.values = get_values(s["values"], "sweep.values");
    }

    if (doc.contains("estimate")) {
        const json& e = doc["estimate"];
        reject_unknown_keys(e, {"m_per_repeat", "repeats", "bracket", "rounds", "m_per_round"},
                            "estimate");
        cfg.estimate.m_per_repeat = get_int(e, "m_per_repeat", cfg.estimate.m_per_repeat);
        cfg.estimate.repeats = get_int(e, "repeats", cfg.estimate.repeats);
        cfg.estimate.rounds = get_int(e, "rounds", cfg.estimate.rounds);
        cfg.estimate.m_per_round = get_int(e, "m_per_round", cfg.estimate.m_per_round);
        if (e.contains("bracket")) {
            const auto b = get_values(e["bracket"], "estimate.bracket");
            if (b.size() != 2 || !(b[0] < b[1]))
                throw ConfigError("estimate.bracket must be [lo, hi] with lo < hi");
            cfg.estimate.bracket = {b[0], b[1]};
        }
        if (cfg.estimate.m_per_repeat < 1 || cfg.estimate.repeats < 2 ||
            cfg.estimate.rounds < 1 || cfg.estimate.m_per_round < 1)
            throw ConfigError("estimate sizes must be positive (repeats >= 2)");
    }

    if (doc.contains("qfi_table")) {
        const json& q = doc["qfi_table"];
        reject_unknown_keys(q, {"lambdas", "nps", "ms"}, "qfi_table");
        if (q.contains("lambdas")) cfg.qfi_table.lambdas = get_values(q["lambdas"], "qfi_table.lambdas");
        if (q.contains("nps")) cfg.qfi_table.nps = get_values(q["nps"], "qfi_table.nps");
        if (q.contains("ms")) cfg.qfi_table.ms = get_values(q["ms"], "qfi_table.ms");
    }

    if (doc.contains("output")) {
        const json& o = doc["output"];
        reject_unknown_keys(o, {"path", "format"}, "output");
        if (o.contains("path")) cfg.out_path = o["path"].get<std::string>();
        if (o.contains("format")) {
            const std::string f = o["format"].get<std::string>();
            if (f == "csv")
                cfg.format = OutputFormat::csv;
            else if (f == "json")
                cfg.format = OutputFormat::json;
            else
                throw ConfigError("output.format must be 'csv' or 'json'");
        }
    }

    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer() || doc["seed"].get<long long>() < 0)
            throw ConfigError("'seed' must be a non-negative integer");
        cfg.seed = doc["seed"].get<uint64_t>();
    }
    cfg.threads = get_int(doc, "threads", cfg.threads);
    if (cfg.threads < 1) throw ConfigError("'threads' must be >= 1");
    cfg.max_joint_dim = get_int(doc, "max_joint_dim", static_cast<int>(cfg.max_joint_dim));
    if (cfg.max_joint_dim < 4) throw ConfigError("'max_joint_dim' must be >= 4");
    return cfg;
}

std::string check_report(const ExperimentConfig& cfg) {
    std::string out = "config: ok\n";
    for (Kind kind : cfg.kinds) {
        out += std::string("[") + kind_name(kind) + "]\n";
        out += check_validity(cfg.params, kind).to_text();
    }
    return out;
}

}  // namespace aprobe
