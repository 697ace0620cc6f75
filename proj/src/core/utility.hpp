#pragma once

#include <map>
#include <string>
#include <vector>

#include "beliefs.hpp"
#include "objective.hpp"

namespace quansim {

enum class UtilityMethod { Reward, Action, EgoReward, Always, Never };

UtilityMethod utility_method_from_name(const std::string& name);  // throws InvalidArgumentError
const char* utility_method_name(UtilityMethod m);

// Finite nonnegative utility or the distinguished infinite value that forces
// transmission regardless of the threshold.
class UtilityValue {
public:
    static UtilityValue infinite() {
        UtilityValue u;
        u.infinite_ = true;
        return u;
    }
    static UtilityValue finite(double v);  // throws InvalidArgumentError if v < 0 or non-finite

    bool is_infinite() const { return infinite_; }
    double value() const;  // throws InvalidArgumentError when infinite

private:
    bool infinite_ = false;
    double value_ = 0.0;
};

struct DecisionPolicy {
    UtilityMethod method = UtilityMethod::Always;
    double threshold = 0.0;  // cost of loading the network with one message
    double radius = 15.0;    // used by p_est; matches the network radius
    double eta = 0.4;

    void validate() const;  // throws InvalidArgumentError
};

// Reward a message would give teammate j under the believed model GP^j.
// Infinite when j is believed to hold no measurements yet.
UtilityValue utility_reward(const Message& msg, const TeammateBelief& belief,
                            const ObjectiveConfig& cfg, const GpHyperparams& hp,
                            const GridGeometry& grid);

// Infinite when the message would change the action j is believed to take
// next (greedy plan from g^j with vs. without the message); otherwise falls
// through to utility_reward. `timestep` stamps the hypothetical plan patches.
UtilityValue utility_action(const Message& msg, const TeammateBelief& belief,
                            const ObjectiveConfig& cfg, const SensorModel& sensor,
                            const GpHyperparams& hp, const GridGeometry& grid, int timestep);

// The reward the ego robot itself received from the measurement, evaluated on
// its own posterior from before the update; identical for every recipient.
UtilityValue utility_ego(const Message& msg, const GpPosterior& ego_gp_before,
                         const ObjectiveConfig& cfg);

// Constant baselines. Always -> infinite, Never -> 0.
UtilityValue utility_constant(UtilityMethod method);  // throws unless Always or Never

// Estimated transmission success probability: exact channel probability when
// the teammate was sensed within radius this step, optimistically
// p_success(radius) = 0.5 otherwise.
double p_est(const TeammateBelief& belief, Cell self_loc, double eta, double radius,
             double cell_size_m, bool radius_in_cells = false);

// Expected team utility: mean of per-teammate utilities weighted by estimated
// success probability. Infinite if any per-teammate utility is infinite. Both
// maps must cover exactly the team_size-1 teammates.
UtilityValue aggregate_expected_utility(const std::map<int, UtilityValue>& utilities,
                                        const std::map<int, double>& probs, int team_size);

// Threshold rule: infinite passes unconditionally, finite passes iff U >= T.
bool decide_transmit(const UtilityValue& aggregated, double threshold);

// Policy-level decision; Never short-circuits to false before the threshold
// comparison (with u_nv = 0 and T = 0 the raw rule would paradoxically always
// send).
bool decide_transmit(UtilityMethod method, const UtilityValue& aggregated, double threshold);

// Empirical percentile (shared interpolation rule) of finite utility samples
// gathered from Always-policy calibration runs. Requires >= 20 samples.
double calibrate_threshold(std::vector<double> finite_samples, double percentile = 0.25);

}  // namespace quansim
