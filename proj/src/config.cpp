#include "starbsde/config.hpp"

#include <fstream>

namespace starbsde {

using nlohmann::json;

namespace {

std::vector<double> as_vector(const json& j, const std::string& path) {
    if (!j.is_array()) throw ValidationError(path + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ValidationError(path + ": expected numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

double get_num(const json& j, const std::string& key, double fallback,
               const std::string& path) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ValidationError(path + "." + key + ": expected a number");
    return j[key].get<double>();
}

} // namespace

Driver driver_from_spec(const json& spec) {
    if (!spec.is_object() || !spec.contains("name"))
        throw ValidationError("driver: expected {\"name\": ..., \"params\": {...}}");
    const std::string name = spec["name"].get<std::string>();
    const json params = spec.value("params", json::object());

    if (name == "zero") return zero_driver();
    if (name == "scaled_abs_z") return scaled_abs_z(get_num(params, "mu", 0.5, "driver.params"));
    if (name == "linear_y") return linear_y(get_num(params, "a", -1.0, "driver.params"));
    if (name == "neg_part_y") return neg_part_y();
    if (name == "example1")
        return example1(get_num(params, "gamma", 1.0, "driver.params"),
                        get_num(params, "delta", 1.0, "driver.params"));
    if (name == "example2") {
        if (!params.contains("thresholds")) return example2_default();
        return example2(as_vector(params["rate_neg"], "driver.params.rate_neg"),
                        as_vector(params["rate_pos"], "driver.params.rate_pos"),
                        as_vector(params["thresholds"], "driver.params.thresholds"),
                        get_num(params, "ramp_width", 0.2, "driver.params"));
    }
    if (name == "example2_staircase") return example2_staircase();
    if (name == "example3") {
        if (!params.contains("lambdas")) return example3_default();
        return example3(as_vector(params["lambdas"], "driver.params.lambdas"),
                        as_vector(params["thresholds"], "driver.params.thresholds"));
    }
    if (name == "example3_restricted")
        return example3_restricted(get_num(params, "lambda1", 5.0, "driver.params"),
                                   get_num(params, "z1", 1.0, "driver.params"));
    throw ValidationError("driver.name: unknown driver '" + name + "'");
}

TerminalClaim claim_from_spec(const json& spec) {
    if (!spec.is_object() || !spec.contains("kind"))
        throw ValidationError("claim: expected {\"kind\": ...}");
    const std::string kind = spec["kind"].get<std::string>();

    TerminalClaim claim;
    if (kind == "identity") {
        claim = identity_claim();
    } else if (kind == "constant") {
        claim = constant_claim(get_num(spec, "value", 0.0, "claim"));
    } else if (kind == "call") {
        claim = call_claim(get_num(spec, "strike", 0.0, "claim"));
    } else if (kind == "table") {
        // Deferred: the table needs the lattice; store the raw values in the
        // payoff via a thrown error if sizes mismatch at evaluation time.
        throw ValidationError("claim.kind: 'table' claims are built via table_claim() and a "
                              "lattice; supply identity/constant/call in configs");
    } else {
        throw ValidationError("claim.kind: unknown claim '" + kind + "'");
    }
    const double scale_factor = get_num(spec, "scale", 1.0, "claim");
    const double shift = get_num(spec, "shift", 0.0, "claim");
    if (scale_factor != 1.0) claim = scaled_claim(claim, scale_factor);
    if (shift != 0.0) claim = shifted_claim(claim, shift);
    return claim;
}

ExperimentConfig parse_experiment(const json& j) {
    if (!j.is_object()) throw ValidationError("experiment: expected an object");
    ExperimentConfig cfg;
    cfg.id = j.value("id", std::string("experiment"));
    cfg.task = j.value("task", std::string(""));
    if (!j.contains("lattice") || !j["lattice"].is_object())
        throw ValidationError("lattice: expected {\"T\": ..., \"N\": ...}");
    cfg.horizon = get_num(j["lattice"], "T", 1.0, "lattice");
    const double n = get_num(j["lattice"], "N", 100, "lattice");
    if (n < 1 || n != std::floor(n)) throw ValidationError("lattice.N: expected a positive integer");
    cfg.steps = static_cast<int>(n);
    if (!(cfg.horizon > 0.0)) throw ValidationError("lattice.T: must be > 0");
    cfg.driver_spec = j.value("driver", json{{"name", "zero"}});
    cfg.claim_spec = j.value("claim", json{{"kind", "identity"}});
    cfg.claim2_spec = j.value("claim2", json());
    cfg.params = j.value("params", json::object());
    cfg.asserts = j.value("assert", json::array());
    cfg.seed = j.value("seed", 0ULL);

    // Fail fast on malformed specs (no partial output downstream).
    driver_from_spec(cfg.driver_spec);
    claim_from_spec(cfg.claim_spec);
    if (!cfg.claim2_spec.is_null()) claim_from_spec(cfg.claim2_spec);
    return cfg;
}

std::vector<ExperimentConfig> load_config_file(
    const std::string& path, const std::optional<std::string>& task_override,
    const std::optional<std::uint64_t>& seed_override) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError("config: JSON parse error in '" + path + "': " + e.what());
    }

    std::vector<ExperimentConfig> out;
    if (j.is_object() && j.contains("experiments")) {
        for (const auto& e : j["experiments"]) out.push_back(parse_experiment(e));
    } else {
        out.push_back(parse_experiment(j));
    }
    for (ExperimentConfig& cfg : out) {
        if (task_override && !task_override->empty() && *task_override != "batch")
            cfg.task = *task_override;
        if (seed_override) cfg.seed = *seed_override;
        if (cfg.task.empty())
            throw ValidationError("task: missing (set in the config or via the subcommand)");
        // The k*delta constraint is checked before solving.
        const Driver d = driver_from_spec(cfg.driver_spec);
        if (std::isfinite(d.lipschitz_k()) &&
            d.lipschitz_k() * cfg.horizon / cfg.steps > 0.5)
            throw ValidationError("lattice.N: k*delta > 0.5 for driver '" + d.name() +
                                  "'; increase N");
    }
    return out;
}

} // namespace starbsde
