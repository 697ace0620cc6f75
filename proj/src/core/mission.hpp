#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "beliefs.hpp"
#include "errors.hpp"
#include "grid_field.hpp"
#include "network.hpp"
#include "objective.hpp"
#include "utility.hpp"

namespace quansim {

struct TeamConfig {
    int num_robots = 4;
    int budget = 10;            // planning steps per robot
    double spread_alpha = 0.2;  // centered subrectangle fraction for initial placement
    ObjectiveConfig objective;  // carries the quantile set
    DecisionPolicy policy;
    NetworkConfig network;
    SensorModel sensor;
    GpHyperparams gp;
    std::uint64_t master_seed = 0;

    // Calibration observation mode: additionally evaluate the Reward and
    // Ego-reward utilities at every step (without influencing decisions) and
    // record the finite values in the run log.
    bool collect_utility_samples = false;

    void validate() const;
};

struct RobotState {
    int id = 0;
    Cell position{};
    MeasurementSet own_data;  // firsthand plus received measurements
    GpPosterior own_gp;       // always fit(own_data)
    std::map<int, TeammateBelief> beliefs;
    int steps_taken = 0;
};

struct StepRecord {
    int step = 0;   // 1-based global team step
    int robot = 0;  // acting robot
    Action action = Action::PosX;
    Cell position{};  // post-move
    std::map<int, UtilityValue> utilities;
    bool aggregate_infinite = false;
    double aggregate_value = 0.0;  // meaningful when not infinite
    bool decided = false;
    DeliveryReport delivery;         // empty when no broadcast
    std::vector<double> robot_rmse;  // each robot's current estimate RMSE
    long cum_attempted = 0;
    long cum_successful = 0;
};

struct RunLog {
    std::vector<StepRecord> steps;
    std::vector<double> true_values;
    std::vector<double> final_estimates;  // offline aggregation result
    double final_rmse = 0.0;
    std::vector<double> per_robot_final_rmse;
    long total_attempted = 0;
    long total_successful = 0;
    std::vector<double> observed_reward_utilities;  // calibration mode only
    std::vector<double> observed_ego_utilities;
};

// Raised when a module error aborts a run mid-flight; carries the partial log.
class MissionAborted : public Error {
public:
    MissionAborted(const Error& cause, RunLog partial)
        : Error(cause.code(), cause.what()), partial_(std::move(partial)) {}
    const RunLog& partial_log() const { return partial_; }

private:
    RunLog partial_;
};

// Places robots uniformly at random on distinct cells of the centered
// subrectangle whose sides are spread_alpha times the grid sides, gives every
// robot all starting locations, and takes the initial measurement at each
// start. Throws PlacementError if the subrectangle has fewer than num_robots
// cells.
std::vector<RobotState> initialize(const TeamConfig& cfg, const GridField& field);

// Round-robin exploration loop (ids ascending): each team step one robot
// senses teammate locations, plans, moves, measures, evaluates utilities,
// decides, and broadcasts; successful deliveries are merged by recipients
// before the next robot acts. Runs num_robots * budget team steps.
RunLog run_exploration(std::vector<RobotState>& team, const GridField& field,
                       const TeamConfig& cfg);

struct AggregateResult {
    std::vector<double> estimates;
    double rmse = 0.0;
};

// Offline aggregation: one GP fit on the union of all firsthand measurements,
// then quantiles of its mean and RMSE against the true values.
AggregateResult aggregate_final(const std::vector<RobotState>& team, const TeamConfig& cfg,
                                const GridField& field);

// Initialization + exploration + aggregation.
RunLog run_mission(const TeamConfig& cfg, const GridField& field);

}  // namespace quansim
