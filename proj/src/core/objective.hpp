#pragma once

#include <optional>
#include <vector>

#include "gp.hpp"
#include "sensor.hpp"

namespace quansim {

struct ObjectiveConfig {
    double variance_weight_c = 0.01;
    QuantileSet quantiles;

    void validate() const;  // throws InvalidArgumentError
};

// Quantiles (shared empirical rule) of the posterior mean over all cells.
std::vector<double> estimate_quantiles(const GpPosterior& gp, const QuantileSet& q);

// Asymptotic standard error of each empirical quantile of `sample`:
// sqrt(p(1-p)/n) / fhat(v_p), with fhat a Gaussian KDE using the Silverman
// bandwidth 0.9 * min(sd, IQR/1.34) * n^(-1/5). The density is floored at 1e-6
// so degenerate samples stay finite.
std::vector<double> quantile_standard_errors(const std::vector<double>& sample,
                                             const QuantileSet& q);
std::vector<double> quantile_standard_errors(const Eigen::VectorXd& sample, const QuantileSet& q);

// Quantile standard-error objective: the L1 change that conditioning on
// `proposed` induces in the se vector, normalized by |Q|, plus
// c * sum of the pre-update posterior variance at the proposed locations.
double objective_f(const MeasurementSet& proposed, const GpPosterior& gp,
                   const ObjectiveConfig& cfg);

struct PlanResult {
    Action action;
    Cell destination;
    double objective = 0.0;
    std::vector<Cell> patch;  // sensor footprint at the destination
};

// Objective gaps at or below this spacing are numerical noise from symmetric
// candidates, not preferences; the planner treats them as exact ties.
inline double plan_tie_epsilon(double objective) {
    return 1e-12 + 1e-9 * std::abs(objective);
}

// Greedy one-step planner: evaluates objective_f for the sensor patch at each
// legal destination, using the current posterior mean as the hypothetical
// values. Ties keep the earliest action in the fixed order +x, -x, +y, -y.
// `hypothetical_token` stamps the proposed measurements; pick one that is not
// already in the training set so the hypothetical update is not deduplicated
// away.
PlanResult plan_next(Cell position, const GpPosterior& gp, const ObjectiveConfig& cfg,
                     const SensorModel& sensor, ProvenanceToken hypothetical_token);

}  // namespace quansim
