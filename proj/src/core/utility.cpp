#include "utility.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace quansim {

UtilityMethod utility_method_from_name(const std::string& name) {
    if (name == "reward") return UtilityMethod::Reward;
    if (name == "action") return UtilityMethod::Action;
    if (name == "ego_reward" || name == "ego-reward") return UtilityMethod::EgoReward;
    if (name == "always") return UtilityMethod::Always;
    if (name == "never") return UtilityMethod::Never;
    throw InvalidArgumentError("unknown utility method: " + name);
}

const char* utility_method_name(UtilityMethod m) {
    switch (m) {
        case UtilityMethod::Reward: return "reward";
        case UtilityMethod::Action: return "action";
        case UtilityMethod::EgoReward: return "ego_reward";
        case UtilityMethod::Always: return "always";
        case UtilityMethod::Never: return "never";
    }
    return "?";
}

UtilityValue UtilityValue::finite(double v) {
    if (!std::isfinite(v) || v < 0.0) {
        throw InvalidArgumentError("finite utility must be a nonnegative real, got " +
                                   std::to_string(v));
    }
    UtilityValue u;
    u.value_ = v;
    return u;
}

double UtilityValue::value() const {
    if (infinite_) throw InvalidArgumentError("value() on an infinite utility");
    return value_;
}

void DecisionPolicy::validate() const {
    if (threshold < 0.0) throw InvalidArgumentError("decision threshold must be >= 0");
    if (!(radius > 0.0)) throw InvalidArgumentError("policy radius must be > 0");
    if (!(eta > 0.0)) throw InvalidArgumentError("policy eta must be > 0");
}

UtilityValue utility_reward(const Message& msg, const TeammateBelief& belief,
                            const ObjectiveConfig& cfg, const GpHyperparams& hp,
                            const GridGeometry& grid) {
    if (belief.believed_data().empty()) return UtilityValue::infinite();
    return UtilityValue::finite(objective_f(msg.body, belief.believed_gp(hp, grid), cfg));
}

UtilityValue utility_action(const Message& msg, const TeammateBelief& belief,
                            const ObjectiveConfig& cfg, const SensorModel& sensor,
                            const GpHyperparams& hp, const GridGeometry& grid, int timestep) {
    if (belief.believed_data().empty()) return UtilityValue::infinite();
    const GpPosterior& gp_without = belief.believed_gp(hp, grid);
    const GpPosterior gp_with = gp_without.extended(msg.body);
    const ProvenanceToken plan_token{belief.teammate_id(), timestep};
    const Cell from = belief.last_known_location();
    const PlanResult without_msg = plan_next(from, gp_without, cfg, sensor, plan_token);
    const PlanResult with_msg = plan_next(from, gp_with, cfg, sensor, plan_token);
    if (without_msg.action != with_msg.action) return UtilityValue::infinite();
    return utility_reward(msg, belief, cfg, hp, grid);
}

UtilityValue utility_ego(const Message& msg, const GpPosterior& ego_gp_before,
                         const ObjectiveConfig& cfg) {
    return UtilityValue::finite(objective_f(msg.body, ego_gp_before, cfg));
}

UtilityValue utility_constant(UtilityMethod method) {
    if (method == UtilityMethod::Always) return UtilityValue::infinite();
    if (method == UtilityMethod::Never) return UtilityValue::finite(0.0);
    throw InvalidArgumentError("utility_constant applies to Always/Never only");
}

double p_est(const TeammateBelief& belief, Cell self_loc, double eta, double radius,
             double cell_size_m, bool radius_in_cells) {
    const double scale = radius_in_cells ? 1.0 : cell_size_m;
    const double d = distance_cells(self_loc, belief.last_known_location()) * scale;
    if (belief.location_fresh() && d <= radius) {
        return p_success(d, eta, radius);
    }
    return p_success(radius, eta, radius);  // optimistic default, exactly 0.5
}

UtilityValue aggregate_expected_utility(const std::map<int, UtilityValue>& utilities,
                                        const std::map<int, double>& probs, int team_size) {
    const auto expected = static_cast<std::size_t>(team_size - 1);
    if (utilities.size() != expected || probs.size() != expected) {
        throw ShapeError("expected utility over " + std::to_string(expected) +
                         " teammates, got " + std::to_string(utilities.size()) + " utilities and " +
                         std::to_string(probs.size()) + " probabilities");
    }
    double sum = 0.0;
    for (const auto& [id, u] : utilities) {
        const auto p = probs.find(id);
        if (p == probs.end()) {
            throw ShapeError("missing success probability for teammate " + std::to_string(id));
        }
        if (u.is_infinite()) return UtilityValue::infinite();
        sum += p->second * u.value();
    }
    return UtilityValue::finite(sum / static_cast<double>(team_size - 1));
}

bool decide_transmit(const UtilityValue& aggregated, double threshold) {
    return aggregated.is_infinite() || aggregated.value() >= threshold;
}

bool decide_transmit(UtilityMethod method, const UtilityValue& aggregated, double threshold) {
    if (method == UtilityMethod::Never) return false;
    return decide_transmit(aggregated, threshold);
}

double calibrate_threshold(std::vector<double> finite_samples, double percentile) {
    if (finite_samples.size() < 20) {
        throw InvalidArgumentError("threshold calibration needs >= 20 finite samples, got " +
                                   std::to_string(finite_samples.size()));
    }
    if (!(percentile >= 0.0 && percentile <= 1.0)) {
        throw InvalidArgumentError("calibration percentile must lie in [0,1]");
    }
    std::sort(finite_samples.begin(), finite_samples.end());
    return sorted_quantile(finite_samples, percentile);
}

}  // namespace quansim
