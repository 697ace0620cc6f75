#include "objective.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace quansim {

namespace {

constexpr double kDensityFloor = 1e-6;
constexpr double kBandwidthFloor = 1e-9;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

double silverman_bandwidth(const std::vector<double>& sorted) {
    const std::size_t n = sorted.size();
    double mean = 0.0;
    for (double v : sorted) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : sorted) ss += (v - mean) * (v - mean);
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    const double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (spread <= 0.0) spread = sd;  // zero IQR with nonzero sd
    const double h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
    return std::max(h, kBandwidthFloor);
}

double kde_at(const std::vector<double>& sample, double point, double bandwidth) {
    double acc = 0.0;
    const double inv_h = 1.0 / bandwidth;
    for (double v : sample) {
        const double z = (point - v) * inv_h;
        acc += std::exp(-0.5 * z * z);
    }
    return acc * kInvSqrt2Pi * inv_h / static_cast<double>(sample.size());
}

std::vector<double> standard_errors_sorted(const std::vector<double>& sorted,
                                           const QuantileSet& q) {
    const auto n = static_cast<double>(sorted.size());
    const double h = silverman_bandwidth(sorted);
    std::vector<double> out;
    out.reserve(q.size());
    for (double p : q.levels()) {
        const double vp = sorted_quantile(sorted, p);
        const double density = std::max(kde_at(sorted, vp, h), kDensityFloor);
        out.push_back(std::sqrt(p * (1.0 - p) / n) / density);
    }
    return out;
}

}  // namespace

void ObjectiveConfig::validate() const {
    if (variance_weight_c < 0.0) throw InvalidArgumentError("variance_weight_c must be >= 0");
    if (quantiles.size() == 0) throw InvalidArgumentError("objective requires a quantile set");
}

std::vector<double> estimate_quantiles(const GpPosterior& gp, const QuantileSet& q) {
    const Eigen::VectorXd& mean = gp.mean_grid();
    std::vector<double> values(mean.data(), mean.data() + mean.size());
    return empirical_quantiles(values, q);
}

std::vector<double> quantile_standard_errors(const std::vector<double>& sample,
                                             const QuantileSet& q) {
    if (sample.size() < 2) throw ShapeError("quantile_standard_errors needs n >= 2");
    std::vector<double> sorted(sample);
    std::sort(sorted.begin(), sorted.end());
    return standard_errors_sorted(sorted, q);
}

std::vector<double> quantile_standard_errors(const Eigen::VectorXd& sample, const QuantileSet& q) {
    return quantile_standard_errors(
        std::vector<double>(sample.data(), sample.data() + sample.size()), q);
}

double objective_f(const MeasurementSet& proposed, const GpPosterior& gp,
                   const ObjectiveConfig& cfg) {
    cfg.validate();
    if (proposed.empty()) throw InvalidArgumentError("objective_f requires a nonempty proposal");

    const ExtensionEval eval = gp.evaluate_extension(proposed);
    const auto se_before = quantile_standard_errors(gp.mean_grid(), cfg.quantiles);
    const auto se_after = quantile_standard_errors(eval.mean_grid, cfg.quantiles);
    double d = 0.0;
    for (std::size_t i = 0; i < se_before.size(); ++i) {
        d += std::abs(se_before[i] - se_after[i]);
    }

    double variance_sum = 0.0;
    if (cfg.variance_weight_c > 0.0) {
        // Pre-update variance over every proposed location. Entries that
        // survived dedup come out of the extension evaluation for free; the
        // deduplicated ones need an explicit query.
        std::vector<bool> covered(proposed.size(), false);
        for (std::size_t i = 0; i < eval.kept.size(); ++i) {
            variance_sum += eval.kept_base_variance[i];
            covered[eval.kept[i]] = true;
        }
        std::vector<Cell> rest;
        for (std::size_t i = 0; i < proposed.size(); ++i) {
            if (!covered[i]) rest.push_back(proposed.locations()[i]);
        }
        if (!rest.empty()) {
            for (double v : gp.variances_at(rest)) variance_sum += v;
        }
    }

    return d / static_cast<double>(cfg.quantiles.size()) + cfg.variance_weight_c * variance_sum;
}

PlanResult plan_next(Cell position, const GpPosterior& gp, const ObjectiveConfig& cfg,
                     const SensorModel& sensor, ProvenanceToken hypothetical_token) {
    cfg.validate();
    sensor.validate();
    const GridGeometry& grid = gp.grid();
    const auto actions = legal_actions(position, grid);
    if (actions.empty()) throw BoundsError("no legal action from the given position");

    std::optional<PlanResult> best;
    for (Action a : actions) {
        const Cell dest = apply_action(position, a);
        const auto patch = patch_cells(grid, dest, sensor.patch_side);
        MeasurementSet hypothetical;
        const Eigen::VectorXd& mean = gp.mean_grid();
        for (Cell c : patch) {
            hypothetical.add(c, mean[grid.index_of(c)], hypothetical_token);
        }
        const double value = objective_f(hypothetical, gp, cfg);
        // Differences below rounding level (symmetric candidates) count as
        // ties; the earlier action in the fixed order wins.
        if (!best || value > best->objective + plan_tie_epsilon(best->objective)) {
            best = PlanResult{a, dest, value, patch};
        }
    }
    return *best;
}

}  // namespace quansim
