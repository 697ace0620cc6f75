#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "mission.hpp"
#include "synthetic.hpp"

namespace quansim {

// Where the field comes from: a synthetic generator or a raster file.
struct FieldConfig {
    std::string kind = "smoothed_noise";  // smoothed_noise | gaussian_blobs | raster
    int width = 25;
    int height = 25;
    std::string path;        // raster path, required when kind == "raster"
    bool normalize = true;   // min-max normalize raster input
    double cell_size_m = 3.2;
    std::optional<std::uint64_t> seed;  // pin one field for every run; default derives per run
};

struct NamedQuantileSet {
    std::string name;
    std::vector<double> levels;
};

struct ExperimentMatrixConfig {
    std::vector<UtilityMethod> methods = {UtilityMethod::Always, UtilityMethod::Never,
                                          UtilityMethod::Reward, UtilityMethod::Action,
                                          UtilityMethod::EgoReward};
    std::vector<NamedQuantileSet> quantile_sets = {
        {"quartiles", {0.25, 0.5, 0.75}},
        {"median_extrema", {0.5, 0.9, 0.99}},
        {"extrema", {0.9, 0.95, 0.99}},
    };
    int seeds = 5;
    int workers = 0;  // 0 = hardware concurrency
    std::string output_dir = "out";
};

// Full run/experiment configuration, the unit the config file describes.
struct SimConfig {
    FieldConfig field;
    GpHyperparams gp;
    double variance_weight_c = 0.01;
    SensorModel sensor;
    NetworkConfig network;
    UtilityMethod method = UtilityMethod::Always;  // single-run method
    double threshold_reward = 2.8e-4;              // Reward and Action
    double threshold_ego = 8.3e-5;                 // Ego-reward
    int num_robots = 4;
    int budget = 10;
    double spread_alpha = 0.2;
    std::vector<double> quantiles = {0.25, 0.5, 0.75};  // single-run quantile set
    std::uint64_t seed = 0;
    ExperimentMatrixConfig experiment;

    double threshold_for(UtilityMethod m) const;
    DecisionPolicy policy_for(UtilityMethod m) const;

    // TeamConfig for one run cell; `run_seed` becomes the master seed.
    TeamConfig team_config(UtilityMethod m, const std::vector<double>& quantile_levels,
                           std::uint64_t run_seed) const;

    // Field for one run; synthetic fields derive their seed from run_seed
    // unless field.seed pins one.
    GridField make_field(std::uint64_t run_seed) const;
};

SimConfig sim_config_from_json(const nlohmann::ordered_json& j);
SimConfig sim_config_from_file(const std::string& path);
SimConfig sim_config_from_string(const std::string& text);
nlohmann::ordered_json sim_config_to_json(const SimConfig& cfg);

// Overlay `overrides` (same schema, any subset of keys) onto `cfg`.
SimConfig sim_config_merged(const SimConfig& cfg, const std::string& overrides_json);

// Human-readable schema with defaults and per-key notes.
std::string sim_config_schema();

}  // namespace quansim
