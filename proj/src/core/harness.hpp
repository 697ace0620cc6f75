#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "sim_config.hpp"
#include "stats.hpp"

namespace quansim {

struct RunCell {
    UtilityMethod method = UtilityMethod::Always;
    std::string qset_name;
    std::vector<double> levels;
    int seed_index = 0;
    std::uint64_t run_seed = 0;
};

struct RunOutcome {
    RunCell cell;
    bool ok = false;
    std::string error;
    double final_rmse = 0.0;
    long attempted = 0;
    long successful = 0;
    std::vector<long> cum_attempted;     // per team step
    std::vector<long> cum_successful;
    std::vector<long> step_attempted;
    std::vector<long> step_successful;
    std::vector<double> observed_reward;  // calibration mode
    std::vector<double> observed_ego;
    std::string dir;  // artifact directory
};

struct MethodSummary {
    UtilityMethod method = UtilityMethod::Always;
    int runs_ok = 0;
    int runs_failed = 0;
    double attempted_mean = 0.0;
    double attempted_std = 0.0;
    double successful_mean = 0.0;
    double successful_std = 0.0;
    double median_final_rmse = 0.0;
    // Pairwise vs Always, matched on (quantile set, seed); absent for the
    // Always row itself or when no Always runs exist.
    std::optional<double> median_attempted_decrease_pct;
    std::optional<double> median_successful_decrease_pct;
    std::optional<double> median_rmse_increase_pct;
};

struct MatrixResult {
    std::vector<RunOutcome> runs;
    std::vector<MethodSummary> summary;
};

// Executes every (method, quantile set, seed) cell, writing one artifact
// directory per run plus summary.csv/summary.json under out_dir. The run seed
// for a cell depends only on (quantile set, seed index), so methods are
// compared under common random numbers. Failed runs are recorded and excluded
// from the summary; the matrix continues.
MatrixResult run_matrix(const SimConfig& cfg, const std::string& out_dir, int workers,
                        bool collect_samples = false);

struct CalibrationResult {
    double threshold_reward = 0.0;
    double threshold_ego = 0.0;
    double percentile = 0.25;
    std::size_t reward_samples = 0;
    std::size_t ego_samples = 0;
};

// Runs the configured (quantile set, seed) cells under the Always policy,
// observing the Reward and Ego-reward utilities at every step, and returns the
// requested percentile of the finite samples per method family. Writes a
// mergeable config fragment thresholds.json under out_dir.
CalibrationResult calibrate(const SimConfig& cfg, double percentile, const std::string& out_dir,
                            int workers);

nlohmann::ordered_json summary_table_json(const MatrixResult& result);
nlohmann::ordered_json matrix_report_json(const MatrixResult& result);

// Rebuilds the summary table from run artifacts on disk; when baseline_dir is
// nonempty, adds a paired one-sided Wilcoxon comparison of final RMSE
// (alternative: runs_dir < baseline_dir) per method, matched on
// (method, quantile set, seed).
nlohmann::ordered_json analyze_runs(const std::string& runs_dir, const std::string& baseline_dir);

// Plot-ready CSVs from run artifacts: tradeoff.csv, cumulative_load.csv,
// transmissions.csv, rmse_box.csv, plus manifest.json listing any gaps.
void emit_plot_data(const std::string& runs_dir, const std::string& out_dir);

}  // namespace quansim
