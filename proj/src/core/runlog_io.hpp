#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "mission.hpp"

namespace quansim {

// Per-step rows: step, actor, post-move position, action, aggregated utility,
// decision, per-step and cumulative transmission counters, per-teammate
// utilities (u_<id>, "inf" for infinite, blank for self), and each robot's
// current estimate RMSE.
void write_steps_csv(const RunLog& log, int num_robots, const std::string& path);

// Delivery trace: step, sender, recipient, distance, p, attempted, success.
void write_delivery_csv(const RunLog& log, const std::string& path);

// Final estimates, RMSE, counters, plus caller-supplied metadata and the full
// config echo.
nlohmann::ordered_json run_summary_json(const RunLog& log, const nlohmann::ordered_json& metadata,
                                        const nlohmann::ordered_json& config_echo);

// steps.csv + delivery.csv + summary.json under `dir` (created if needed).
// Files are written atomically (temp file + rename).
void write_run_artifacts(const RunLog& log, int num_robots, const std::string& dir,
                         const nlohmann::ordered_json& metadata,
                         const nlohmann::ordered_json& config_echo);

void write_text_atomic(const std::string& path, const std::string& content);

// Fixed-format float used in all CSV artifacts (deterministic round-trip).
std::string csv_double(double v);

}  // namespace quansim
