#include "mission.hpp"

#include <algorithm>

#include "rng.hpp"
#include "sensor.hpp"

namespace quansim {

namespace {

// Sensor-noise substream index, unique per (team step, robot).
std::uint64_t sensor_stream_index(int step, int robot) {
    return static_cast<std::uint64_t>(step) * 256 + static_cast<std::uint64_t>(robot);
}

std::map<int, Cell> positions_except(const std::vector<RobotState>& team, int self_id) {
    std::map<int, Cell> out;
    for (const auto& r : team) {
        if (r.id != self_id) out[r.id] = r.position;
    }
    return out;
}

std::vector<double> current_rmse_per_robot(const std::vector<RobotState>& team,
                                           const QuantileSet& q,
                                           const std::vector<double>& truth) {
    std::vector<double> out;
    out.reserve(team.size());
    for (const auto& r : team) {
        out.push_back(rmse(estimate_quantiles(r.own_gp, q), truth));
    }
    return out;
}

}  // namespace

void TeamConfig::validate() const {
    if (num_robots < 2) throw InvalidArgumentError("team needs at least 2 robots");
    if (budget < 1) throw InvalidArgumentError("budget must be >= 1");
    if (!(spread_alpha > 0.0 && spread_alpha <= 1.0)) {
        throw InvalidArgumentError("spread_alpha must lie in (0,1]");
    }
    objective.validate();
    policy.validate();
    network.validate();
    sensor.validate();
    gp.validate();
}

std::vector<RobotState> initialize(const TeamConfig& cfg, const GridField& field) {
    cfg.validate();
    const GridGeometry& grid = field.geometry();
    const int sub_w = std::max(1, static_cast<int>(std::lround(cfg.spread_alpha * grid.width)));
    const int sub_h = std::max(1, static_cast<int>(std::lround(cfg.spread_alpha * grid.height)));
    if (static_cast<long>(sub_w) * sub_h < cfg.num_robots) {
        throw PlacementError("spread subrectangle " + std::to_string(sub_w) + "x" +
                             std::to_string(sub_h) + " cannot hold " +
                             std::to_string(cfg.num_robots) + " robots");
    }
    const int off_x = (grid.width - sub_w) / 2;
    const int off_y = (grid.height - sub_h) / 2;

    auto rng = substream(cfg.master_seed, RngPurpose::Placement);
    std::uniform_int_distribution<int> ux(off_x, off_x + sub_w - 1);
    std::uniform_int_distribution<int> uy(off_y, off_y + sub_h - 1);
    std::vector<Cell> starts;
    long guard = 0;
    while (static_cast<int>(starts.size()) < cfg.num_robots) {
        const Cell c{ux(rng), uy(rng)};
        if (std::find(starts.begin(), starts.end(), c) == starts.end()) {
            starts.push_back(c);
        }
        if (++guard > 10000L * cfg.num_robots) {
            throw PlacementError("could not place robots on distinct cells");
        }
    }

    std::vector<RobotState> team(cfg.num_robots);
    for (int i = 0; i < cfg.num_robots; ++i) {
        RobotState& r = team[i];
        r.id = i;
        r.position = starts[i];
        auto sensor_rng = substream(cfg.master_seed, RngPurpose::SensorNoise,
                                    sensor_stream_index(0, i));
        const MeasurementSet patch =
            sense_patch(field, r.position, cfg.sensor, sensor_rng, ProvenanceToken{i, 0});
        r.own_data.merge_unique(patch);
        r.own_gp = GpPosterior::fit(r.own_data, cfg.gp, grid);
        // Starting locations are common knowledge; believed datasets start empty.
        for (int j = 0; j < cfg.num_robots; ++j) {
            if (j != i) r.beliefs.emplace(j, TeammateBelief(j, starts[j]));
        }
    }
    return team;
}

RunLog run_exploration(std::vector<RobotState>& team, const GridField& field,
                       const TeamConfig& cfg) {
    cfg.validate();
    RunLog log;
    log.true_values = true_quantiles(field, cfg.objective.quantiles);
    const GridGeometry& grid = field.geometry();
    const int total_steps = cfg.num_robots * cfg.budget;
    const int team_size = cfg.num_robots;

    try {
        for (int t = 1; t <= total_steps; ++t) {
            RobotState& actor = team[(t - 1) % team_size];
            StepRecord rec;
            rec.step = t;
            rec.robot = actor.id;

            // Location sensing happens before the move, from the step-start position.
            const auto true_positions = positions_except(team, actor.id);
            sense_teammates(actor.position, true_positions, cfg.network.radius,
                            field.cell_size_m(), cfg.network.radius_in_cells, actor.beliefs);

            const PlanResult plan = plan_next(actor.position, actor.own_gp, cfg.objective,
                                              cfg.sensor, ProvenanceToken{actor.id, t});
            rec.action = plan.action;
            actor.position = plan.destination;
            rec.position = actor.position;

            auto sensor_rng = substream(cfg.master_seed, RngPurpose::SensorNoise,
                                        sensor_stream_index(t, actor.id));
            const MeasurementSet patch = sense_patch(field, actor.position, cfg.sensor,
                                                     sensor_rng, ProvenanceToken{actor.id, t});
            const Message msg{actor.id, actor.position, t, patch};

            // The pre-update posterior backs the Ego-reward utility.
            const GpPosterior gp_before = actor.own_gp;
            actor.own_data.merge_unique(patch);
            actor.own_gp = actor.own_gp.extended(patch);

            for (const auto& [j, belief] : actor.beliefs) {
                switch (cfg.policy.method) {
                    case UtilityMethod::Always:
                    case UtilityMethod::Never:
                        rec.utilities.emplace(j, utility_constant(cfg.policy.method));
                        break;
                    case UtilityMethod::Reward:
                        rec.utilities.emplace(
                            j, utility_reward(msg, belief, cfg.objective, cfg.gp, grid));
                        break;
                    case UtilityMethod::Action:
                        rec.utilities.emplace(j, utility_action(msg, belief, cfg.objective,
                                                                cfg.sensor, cfg.gp, grid, t));
                        break;
                    case UtilityMethod::EgoReward:
                        rec.utilities.emplace(j, utility_ego(msg, gp_before, cfg.objective));
                        break;
                }
            }

            if (cfg.collect_utility_samples) {
                for (const auto& [j, belief] : actor.beliefs) {
                    const UtilityValue u =
                        utility_reward(msg, belief, cfg.objective, cfg.gp, grid);
                    if (!u.is_infinite()) log.observed_reward_utilities.push_back(u.value());
                }
                const UtilityValue e = utility_ego(msg, gp_before, cfg.objective);
                if (!e.is_infinite()) log.observed_ego_utilities.push_back(e.value());
            }

            std::map<int, double> probs;
            for (const auto& [j, belief] : actor.beliefs) {
                probs[j] = p_est(belief, actor.position, cfg.policy.eta, cfg.policy.radius,
                                 field.cell_size_m(), cfg.network.radius_in_cells);
            }
            const UtilityValue aggregate =
                aggregate_expected_utility(rec.utilities, probs, team_size);
            rec.aggregate_infinite = aggregate.is_infinite();
            rec.aggregate_value = aggregate.is_infinite() ? 0.0 : aggregate.value();
            rec.decided = decide_transmit(cfg.policy.method, aggregate, cfg.policy.threshold);

            if (rec.decided) {
                auto delivery_rng = substream(cfg.master_seed, RngPurpose::Delivery,
                                              static_cast<std::uint64_t>(t));
                rec.delivery = broadcast(msg, actor.position, true_positions, cfg.network,
                                         field.cell_size_m(), delivery_rng);
                const auto handshake = handshake_outcomes(rec.delivery, cfg.network);
                for (auto& [j, belief] : actor.beliefs) {
                    std::optional<bool> oracle;
                    if (handshake) oracle = handshake->at(j);
                    on_own_broadcast(belief, msg, oracle);
                }
                // Same-step delivery: recipients merge before the next robot acts.
                for (const auto& entry : rec.delivery.entries) {
                    if (!entry.success) continue;
                    RobotState& recipient = team[entry.recipient];
                    on_message_received(recipient.beliefs.at(actor.id), msg);
                    recipient.own_data.merge_unique(msg.body);
                    recipient.own_gp = recipient.own_gp.extended(msg.body);
                }
            }

            actor.steps_taken += 1;
            log.total_attempted += rec.delivery.attempted_count();
            log.total_successful += rec.delivery.success_count();
            rec.cum_attempted = log.total_attempted;
            rec.cum_successful = log.total_successful;
            rec.robot_rmse = current_rmse_per_robot(team, cfg.objective.quantiles,
                                                    log.true_values);
            log.steps.push_back(std::move(rec));
        }
    } catch (const Error& e) {
        throw MissionAborted(e, std::move(log));
    }
    return log;
}

AggregateResult aggregate_final(const std::vector<RobotState>& team, const TeamConfig& cfg,
                                const GridField& field) {
    MeasurementSet firsthand_union;
    for (const auto& r : team) {
        for (std::size_t i = 0; i < r.own_data.size(); ++i) {
            if (r.own_data.tokens()[i].robot_id == r.id) {
                firsthand_union.add(r.own_data.locations()[i], r.own_data.values()[i],
                                    r.own_data.tokens()[i]);
            }
        }
    }
    const GpPosterior aggregate = GpPosterior::fit(firsthand_union, cfg.gp, field.geometry());
    AggregateResult result;
    result.estimates = estimate_quantiles(aggregate, cfg.objective.quantiles);
    result.rmse = rmse(result.estimates, true_quantiles(field, cfg.objective.quantiles));
    return result;
}

RunLog run_mission(const TeamConfig& cfg, const GridField& field) {
    auto team = initialize(cfg, field);
    RunLog log = run_exploration(team, field, cfg);
    const AggregateResult agg = aggregate_final(team, cfg, field);
    log.final_estimates = agg.estimates;
    log.final_rmse = agg.rmse;
    log.per_robot_final_rmse = log.steps.empty()
                                   ? current_rmse_per_robot(team, cfg.objective.quantiles,
                                                            log.true_values)
                                   : log.steps.back().robot_rmse;
    return log;
}

}  // namespace quansim
