#include "runlog_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace quansim {

namespace fs = std::filesystem;

std::string csv_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

void write_steps_csv(const RunLog& log, int num_robots, const std::string& path) {
    std::ostringstream out;
    out << "step,robot,x,y,action,utility,decision,step_attempted,step_successful,"
           "cum_attempted,cum_successful";
    for (int j = 0; j < num_robots; ++j) out << ",u_" << j;
    for (int j = 0; j < num_robots; ++j) out << ",rmse_" << j;
    out << '\n';
    for (const auto& rec : log.steps) {
        out << rec.step << ',' << rec.robot << ',' << rec.position.x << ',' << rec.position.y
            << ',' << action_name(rec.action) << ','
            << (rec.aggregate_infinite ? std::string("inf") : csv_double(rec.aggregate_value))
            << ',' << (rec.decided ? 1 : 0) << ',' << rec.delivery.attempted_count() << ','
            << rec.delivery.success_count() << ',' << rec.cum_attempted << ','
            << rec.cum_successful;
        for (int j = 0; j < num_robots; ++j) {
            out << ',';
            const auto it = rec.utilities.find(j);
            if (it != rec.utilities.end()) {
                out << (it->second.is_infinite() ? std::string("inf")
                                                 : csv_double(it->second.value()));
            }
        }
        for (int j = 0; j < num_robots; ++j) {
            out << ',';
            if (j < static_cast<int>(rec.robot_rmse.size())) {
                out << csv_double(rec.robot_rmse[j]);
            }
        }
        out << '\n';
    }
    write_text_atomic(path, out.str());
}

void write_delivery_csv(const RunLog& log, const std::string& path) {
    std::ostringstream out;
    out << "step,sender,recipient,distance,p,attempted,success\n";
    for (const auto& rec : log.steps) {
        for (const auto& e : rec.delivery.entries) {
            out << rec.step << ',' << rec.robot << ',' << e.recipient << ','
                << csv_double(e.distance_m) << ',' << csv_double(e.probability) << ','
                << (e.attempted ? 1 : 0) << ',' << (e.success ? 1 : 0) << '\n';
        }
    }
    write_text_atomic(path, out.str());
}

nlohmann::ordered_json run_summary_json(const RunLog& log, const nlohmann::ordered_json& metadata,
                                        const nlohmann::ordered_json& config_echo) {
    nlohmann::ordered_json j;
    for (const auto& item : metadata.items()) j[item.key()] = item.value();
    j["steps"] = log.steps.size();
    j["attempted"] = log.total_attempted;
    j["successful"] = log.total_successful;
    j["true_values"] = log.true_values;
    j["final_estimates"] = log.final_estimates;
    j["final_rmse"] = log.final_rmse;
    j["per_robot_final_rmse"] = log.per_robot_final_rmse;
    if (!log.observed_reward_utilities.empty() || !log.observed_ego_utilities.empty()) {
        j["observed_reward_utilities"] = log.observed_reward_utilities;
        j["observed_ego_utilities"] = log.observed_ego_utilities;
    }
    j["config"] = config_echo;
    return j;
}

void write_run_artifacts(const RunLog& log, int num_robots, const std::string& dir,
                         const nlohmann::ordered_json& metadata,
                         const nlohmann::ordered_json& config_echo) {
    fs::create_directories(dir);
    write_steps_csv(log, num_robots, (fs::path(dir) / "steps.csv").string());
    write_delivery_csv(log, (fs::path(dir) / "delivery.csv").string());
    write_text_atomic((fs::path(dir) / "summary.json").string(),
                      run_summary_json(log, metadata, config_echo).dump(2) + "\n");
}

}  // namespace quansim
