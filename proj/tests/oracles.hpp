// Independent reference implementations used to check the production code.
// Everything here is written directly from the defining formulas (dense
// matrix inverses, plain sorts, brute-force enumeration) and deliberately
// shares no code with src/core.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "geometry.hpp"
#include "gp.hpp"
#include "objective.hpp"
#include "grid_field.hpp"
#include "sensor.hpp"

namespace oracles {

struct DensePrediction {
    Eigen::VectorXd mean;
    Eigen::VectorXd variance;
};

// Textbook GP posterior via an explicit dense solve of the full system.
DensePrediction dense_gp_predict(const std::vector<quansim::Cell>& train_locs,
                                 const std::vector<double>& train_values,
                                 const quansim::GpHyperparams& hp,
                                 const std::vector<quansim::Cell>& query);

// Sort-based empirical quantile, h = (n-1)p interpolation.
double sorted_based_quantile(std::vector<double> values, double p);

// Gaussian KDE density and the asymptotic quantile standard error, written
// out directly.
double kde_density(const std::vector<double>& sample, double x);
std::vector<double> quantile_se(const std::vector<double>& sample,
                                const std::vector<double>& levels);

// Term-by-term evaluation of the planning objective on dense-solve posteriors:
// L1 distance of the se vectors before/after conditioning, normalized by the
// number of quantiles, plus c * sum of pre-update variance at the proposal.
double objective_value(const std::vector<quansim::Cell>& train_locs,
                       const std::vector<double>& train_values,
                       const std::vector<quansim::Cell>& proposed_locs,
                       const std::vector<double>& proposed_values,
                       const quansim::GpHyperparams& hp, double variance_weight_c,
                       const std::vector<double>& levels, const quansim::GridGeometry& grid);

// Exhaustive greedy-plan oracle: evaluates every legal action with
// objective_value and hypothetical values from the dense posterior mean.
// Ties keep the earliest action in the fixed order.
quansim::Action exhaustive_plan(quansim::Cell position,
                                const std::vector<quansim::Cell>& train_locs,
                                const std::vector<double>& train_values,
                                const quansim::GpHyperparams& hp, double variance_weight_c,
                                const std::vector<double>& levels,
                                const quansim::GridGeometry& grid, int patch_side);

// Bootstrap standard error of the p-quantile (B resamples with replacement).
double bootstrap_quantile_se(const std::vector<double>& sample, double p, int resamples,
                             std::uint64_t seed);

// Brute-force one-sided Wilcoxon signed-rank p-value (alternative a < b) by
// enumerating all 2^n sign assignments. Zero differences dropped, average
// ranks for ties.
struct BruteWilcoxon {
    double w_statistic;
    double p_value;
};
BruteWilcoxon brute_force_wilcoxon(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace oracles
