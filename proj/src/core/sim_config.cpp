#include "sim_config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "errors.hpp"
#include "raster_io.hpp"
#include "rng.hpp"

namespace quansim {

namespace {

using json = nlohmann::ordered_json;

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw ParseError("config section '" + where + "' must be an object");
}

// Rejects unknown keys so typos fail loudly instead of silently using defaults.
void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& item : j.items()) {
        if (allowed.find(item.key()) == allowed.end()) {
            throw ParseError("unknown config key '" + where + "." + item.key() + "'");
        }
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ParseError(std::string("config key '") + key + "': " + e.what());
        }
    }
}

void parse_field(const json& j, FieldConfig& out) {
    require_object(j, "field");
    check_keys(j, {"kind", "width", "height", "path", "normalize", "cell_size_m", "seed"},
               "field");
    read(j, "kind", out.kind);
    read(j, "width", out.width);
    read(j, "height", out.height);
    read(j, "path", out.path);
    read(j, "normalize", out.normalize);
    read(j, "cell_size_m", out.cell_size_m);
    if (j.contains("seed") && !j.at("seed").is_null()) {
        out.seed = j.at("seed").get<std::uint64_t>();
    }
    if (out.kind != "smoothed_noise" && out.kind != "gaussian_blobs" && out.kind != "raster") {
        throw ParseError("field.kind must be smoothed_noise, gaussian_blobs, or raster");
    }
    if (out.kind == "raster" && out.path.empty()) {
        throw ParseError("field.kind=raster requires field.path");
    }
}

void parse_gp(const json& j, GpHyperparams& out) {
    require_object(j, "gp");
    check_keys(j, {"length_scale_cells", "signal_variance", "noise_variance", "jitter",
                   "prior_mean"},
               "gp");
    read(j, "length_scale_cells", out.length_scale_cells);
    read(j, "signal_variance", out.signal_variance);
    read(j, "noise_variance", out.noise_variance);
    read(j, "jitter", out.jitter);
    read(j, "prior_mean", out.prior_mean);
}

void parse_sensor(const json& j, SensorModel& out) {
    require_object(j, "sensor");
    check_keys(j, {"patch_side", "noise_std"}, "sensor");
    read(j, "patch_side", out.patch_side);
    read(j, "noise_std", out.noise_std);
}

void parse_network(const json& j, NetworkConfig& out) {
    require_object(j, "network");
    check_keys(j, {"eta", "radius", "oracle_handshake", "radius_in_cells"}, "network");
    read(j, "eta", out.eta);
    read(j, "radius", out.radius);
    read(j, "oracle_handshake", out.oracle_handshake);
    read(j, "radius_in_cells", out.radius_in_cells);
}

std::vector<double> parse_levels(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) {
        throw ParseError(where + " must be a nonempty array of quantile levels");
    }
    std::vector<double> levels;
    for (const auto& v : j) levels.push_back(v.get<double>());
    return levels;
}

void parse_experiment(const json& j, ExperimentMatrixConfig& out) {
    require_object(j, "experiment");
    check_keys(j, {"methods", "quantile_sets", "seeds", "workers", "output_dir"}, "experiment");
    if (j.contains("methods")) {
        out.methods.clear();
        for (const auto& m : j.at("methods")) {
            out.methods.push_back(utility_method_from_name(m.get<std::string>()));
        }
        if (out.methods.empty()) throw ParseError("experiment.methods must be nonempty");
    }
    if (j.contains("quantile_sets")) {
        out.quantile_sets.clear();
        const json& qs = j.at("quantile_sets");
        if (!qs.is_array()) {
            throw ParseError(
                "experiment.quantile_sets must be an array of {name, levels} objects");
        }
        for (const auto& item : qs) {
            require_object(item, "experiment.quantile_sets[]");
            check_keys(item, {"name", "levels"}, "experiment.quantile_sets[]");
            if (!item.contains("name") || !item.contains("levels")) {
                throw ParseError("experiment.quantile_sets entries need name and levels");
            }
            const std::string name = item.at("name").get<std::string>();
            out.quantile_sets.push_back(
                {name, parse_levels(item.at("levels"), "experiment.quantile_sets." + name)});
        }
        if (out.quantile_sets.empty()) {
            throw ParseError("experiment.quantile_sets must be nonempty");
        }
    }
    read(j, "seeds", out.seeds);
    read(j, "workers", out.workers);
    read(j, "output_dir", out.output_dir);
    if (out.seeds < 1) throw ParseError("experiment.seeds must be >= 1");
}

void parse_policy(const json& j, SimConfig& out) {
    require_object(j, "policy");
    check_keys(j, {"method", "threshold_reward", "threshold_ego"}, "policy");
    if (j.contains("method")) {
        out.method = utility_method_from_name(j.at("method").get<std::string>());
    }
    read(j, "threshold_reward", out.threshold_reward);
    read(j, "threshold_ego", out.threshold_ego);
}

void parse_team(const json& j, SimConfig& out) {
    require_object(j, "team");
    check_keys(j, {"num_robots", "budget", "spread_alpha", "seed"}, "team");
    read(j, "num_robots", out.num_robots);
    read(j, "budget", out.budget);
    read(j, "spread_alpha", out.spread_alpha);
    read(j, "seed", out.seed);
}

}  // namespace

double SimConfig::threshold_for(UtilityMethod m) const {
    switch (m) {
        case UtilityMethod::Reward:
        case UtilityMethod::Action: return threshold_reward;
        case UtilityMethod::EgoReward: return threshold_ego;
        case UtilityMethod::Always:
        case UtilityMethod::Never: return threshold_reward;
    }
    return threshold_reward;
}

DecisionPolicy SimConfig::policy_for(UtilityMethod m) const {
    DecisionPolicy p;
    p.method = m;
    p.threshold = threshold_for(m);
    p.radius = network.radius;
    p.eta = network.eta;
    return p;
}

TeamConfig SimConfig::team_config(UtilityMethod m, const std::vector<double>& quantile_levels,
                                  std::uint64_t run_seed) const {
    TeamConfig tc;
    tc.num_robots = num_robots;
    tc.budget = budget;
    tc.spread_alpha = spread_alpha;
    tc.objective.variance_weight_c = variance_weight_c;
    tc.objective.quantiles = QuantileSet(quantile_levels);
    tc.policy = policy_for(m);
    tc.network = network;
    tc.sensor = sensor;
    tc.gp = gp;
    tc.master_seed = run_seed;
    return tc;
}

GridField SimConfig::make_field(std::uint64_t run_seed) const {
    if (field.kind == "raster") {
        return load_raster(field.path, field.normalize, field.cell_size_m);
    }
    const std::uint64_t fseed = field.seed
                                    ? *field.seed
                                    : mix_seed(run_seed, static_cast<std::uint64_t>(
                                                             RngPurpose::Field));
    return generate_synthetic(synthetic_kind_from_name(field.kind), field.width, field.height,
                              fseed, field.cell_size_m);
}

SimConfig sim_config_from_json(const json& j) {
    require_object(j, "<root>");
    check_keys(j,
               {"field", "gp", "objective", "sensor", "network", "policy", "team", "quantiles",
                "experiment"},
               "<root>");
    SimConfig cfg;
    if (j.contains("field")) parse_field(j.at("field"), cfg.field);
    if (j.contains("gp")) parse_gp(j.at("gp"), cfg.gp);
    if (j.contains("objective")) {
        require_object(j.at("objective"), "objective");
        check_keys(j.at("objective"), {"variance_weight_c"}, "objective");
        read(j.at("objective"), "variance_weight_c", cfg.variance_weight_c);
    }
    if (j.contains("sensor")) parse_sensor(j.at("sensor"), cfg.sensor);
    if (j.contains("network")) parse_network(j.at("network"), cfg.network);
    if (j.contains("policy")) parse_policy(j.at("policy"), cfg);
    if (j.contains("team")) parse_team(j.at("team"), cfg);
    if (j.contains("quantiles")) {
        cfg.quantiles = parse_levels(j.at("quantiles"), "quantiles");
    }
    if (j.contains("experiment")) parse_experiment(j.at("experiment"), cfg.experiment);

    // Surface malformed values now rather than at run construction.
    QuantileSet validate_q(cfg.quantiles);
    cfg.gp.validate();
    cfg.sensor.validate();
    cfg.network.validate();
    return cfg;
}

SimConfig sim_config_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return sim_config_from_json(j);
}

SimConfig sim_config_from_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config JSON: ") + e.what());
    }
    return sim_config_from_json(j);
}

nlohmann::ordered_json sim_config_to_json(const SimConfig& cfg) {
    nlohmann::ordered_json j;
    j["field"] = {{"kind", cfg.field.kind},
                  {"width", cfg.field.width},
                  {"height", cfg.field.height},
                  {"path", cfg.field.path},
                  {"normalize", cfg.field.normalize},
                  {"cell_size_m", cfg.field.cell_size_m}};
    if (cfg.field.seed) {
        j["field"]["seed"] = *cfg.field.seed;
    } else {
        j["field"]["seed"] = nullptr;
    }
    j["gp"] = {{"length_scale_cells", cfg.gp.length_scale_cells},
               {"signal_variance", cfg.gp.signal_variance},
               {"noise_variance", cfg.gp.noise_variance},
               {"jitter", cfg.gp.jitter},
               {"prior_mean", cfg.gp.prior_mean}};
    j["objective"] = {{"variance_weight_c", cfg.variance_weight_c}};
    j["sensor"] = {{"patch_side", cfg.sensor.patch_side}, {"noise_std", cfg.sensor.noise_std}};
    j["network"] = {{"eta", cfg.network.eta},
                    {"radius", cfg.network.radius},
                    {"oracle_handshake", cfg.network.oracle_handshake},
                    {"radius_in_cells", cfg.network.radius_in_cells}};
    j["policy"] = {{"method", utility_method_name(cfg.method)},
                   {"threshold_reward", cfg.threshold_reward},
                   {"threshold_ego", cfg.threshold_ego}};
    j["team"] = {{"num_robots", cfg.num_robots},
                 {"budget", cfg.budget},
                 {"spread_alpha", cfg.spread_alpha},
                 {"seed", cfg.seed}};
    j["quantiles"] = cfg.quantiles;
    nlohmann::ordered_json qs = nlohmann::ordered_json::array();
    for (const auto& s : cfg.experiment.quantile_sets) {
        qs.push_back({{"name", s.name}, {"levels", s.levels}});
    }
    nlohmann::ordered_json methods = nlohmann::ordered_json::array();
    for (auto m : cfg.experiment.methods) methods.push_back(utility_method_name(m));
    j["experiment"] = {{"methods", methods},
                       {"quantile_sets", qs},
                       {"seeds", cfg.experiment.seeds},
                       {"workers", cfg.experiment.workers},
                       {"output_dir", cfg.experiment.output_dir}};
    return j;
}

SimConfig sim_config_merged(const SimConfig& cfg, const std::string& overrides_json) {
    json base = sim_config_to_json(cfg);
    json overrides;
    try {
        overrides = json::parse(overrides_json);
    } catch (const json::exception& e) {
        throw ParseError(std::string("override JSON: ") + e.what());
    }
    base.merge_patch(overrides);
    return sim_config_from_json(base);
}

std::string sim_config_schema() {
    return R"(quansim configuration (JSON). Every key is optional; defaults shown.

{
  "field": {
    "kind": "smoothed_noise",      // smoothed_noise | gaussian_blobs | raster
    "width": 25, "height": 25,     // synthetic field size (>= 5)
    "path": "",                    // raster file (CSV matrix or PGM) when kind=raster
    "normalize": true,             // min-max normalize raster values into [0,1]
    "cell_size_m": 3.2,            // meters per cell; converts distances for the channel
    "seed": null                   // pin one synthetic field for all runs; null derives per run
  },
  "gp": {
    "length_scale_cells": 3.0,     // squared-exponential kernel length scale
    "signal_variance": 0.1,        // prior variance, sized for [0,1] fields
    "noise_variance": 0.0025,      // matches sensor noise_std^2
    "jitter": 1e-8,
    "prior_mean": 0.5              // midpoint of a normalized field
  },
  "objective": {
    "variance_weight_c": 0.01      // weight of the posterior-variance term
  },
  "sensor": {
    "patch_side": 5,               // odd; footprint is patch_side x patch_side cells
    "noise_std": 0.05
  },
  "network": {
    "eta": 0.4,                    // sigmoid dropoff rate
    "radius": 15.0,                // communication radius (meters unless radius_in_cells)
    "oracle_handshake": false,     // exact delivery confirmation to the sender
    "radius_in_cells": false
  },
  "policy": {
    "method": "always",            // always | never | reward | action | ego_reward (single runs)
    "threshold_reward": 2.8e-4,    // T for Reward and Action
    "threshold_ego": 8.3e-5        // T for Ego-reward
  },
  "team": {
    "num_robots": 4,
    "budget": 10,                  // planning steps per robot
    "spread_alpha": 0.2,           // centered start-subrectangle fraction
    "seed": 0                      // master seed (single runs) / matrix base seed
  },
  "quantiles": [0.25, 0.5, 0.75], // single-run quantile set
  "experiment": {
    "methods": ["always", "never", "reward", "action", "ego_reward"],
    "quantile_sets": [
      {"name": "quartiles",      "levels": [0.25, 0.5, 0.75]},
      {"name": "median_extrema", "levels": [0.5, 0.9, 0.99]},
      {"name": "extrema",        "levels": [0.9, 0.95, 0.99]}
    ],
    "seeds": 5,                    // seeds per (method, quantile set) cell
    "workers": 0,                  // 0 = hardware concurrency
    "output_dir": "out"
  }
}
)";
}

}  // namespace quansim
