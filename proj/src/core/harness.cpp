#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "rng.hpp"
#include "runlog_io.hpp"

namespace quansim {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string cell_dir(const std::string& out_dir, const RunCell& cell) {
    return (fs::path(out_dir) / "runs" / utility_method_name(cell.method) / cell.qset_name /
            ("seed" + std::to_string(cell.seed_index)))
        .string();
}

RunOutcome execute_cell(const SimConfig& cfg, const RunCell& cell, const std::string& out_dir,
                        bool collect_samples, const ordered_json& config_echo) {
    RunOutcome outcome;
    outcome.cell = cell;
    outcome.dir = cell_dir(out_dir, cell);
    try {
        const GridField field = cfg.make_field(cell.run_seed);
        TeamConfig tc = cfg.team_config(cell.method, cell.levels, cell.run_seed);
        tc.collect_utility_samples = collect_samples;
        const RunLog log = run_mission(tc, field);

        outcome.ok = true;
        outcome.final_rmse = log.final_rmse;
        outcome.attempted = log.total_attempted;
        outcome.successful = log.total_successful;
        for (const auto& rec : log.steps) {
            outcome.cum_attempted.push_back(rec.cum_attempted);
            outcome.cum_successful.push_back(rec.cum_successful);
            outcome.step_attempted.push_back(rec.delivery.attempted_count());
            outcome.step_successful.push_back(rec.delivery.success_count());
        }
        outcome.observed_reward = log.observed_reward_utilities;
        outcome.observed_ego = log.observed_ego_utilities;

        ordered_json metadata;
        metadata["method"] = utility_method_name(cell.method);
        metadata["quantile_set"] = cell.qset_name;
        metadata["quantile_levels"] = cell.levels;
        metadata["seed_index"] = cell.seed_index;
        metadata["run_seed"] = cell.run_seed;
        metadata["oracle_handshake"] = cfg.network.oracle_handshake;
        metadata["threshold"] = cfg.threshold_for(cell.method);
        write_run_artifacts(log, cfg.num_robots, outcome.dir, metadata, config_echo);
    } catch (const MissionAborted& e) {
        outcome.ok = false;
        outcome.error = e.what();
    } catch (const std::exception& e) {
        outcome.ok = false;
        outcome.error = e.what();
    }
    return outcome;
}

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

struct PairKey {
    std::string qset;
    int seed_index;
    friend bool operator<(const PairKey& a, const PairKey& b) {
        return a.qset != b.qset ? a.qset < b.qset : a.seed_index < b.seed_index;
    }
};

std::vector<MethodSummary> summarize(const std::vector<RunOutcome>& runs,
                                     const std::vector<UtilityMethod>& method_order) {
    std::map<PairKey, const RunOutcome*> always_by_pair;
    for (const auto& r : runs) {
        if (r.ok && r.cell.method == UtilityMethod::Always) {
            always_by_pair[{r.cell.qset_name, r.cell.seed_index}] = &r;
        }
    }

    std::vector<MethodSummary> out;
    for (UtilityMethod m : method_order) {
        MethodSummary s;
        s.method = m;
        std::vector<double> attempted, successful, rmses;
        std::vector<double> att_dec, succ_dec, rmse_inc;
        for (const auto& r : runs) {
            if (r.cell.method != m) continue;
            if (!r.ok) {
                s.runs_failed += 1;
                continue;
            }
            s.runs_ok += 1;
            attempted.push_back(static_cast<double>(r.attempted));
            successful.push_back(static_cast<double>(r.successful));
            rmses.push_back(r.final_rmse);
            if (m != UtilityMethod::Always) {
                const auto it = always_by_pair.find({r.cell.qset_name, r.cell.seed_index});
                if (it == always_by_pair.end()) continue;
                const RunOutcome& base = *it->second;
                if (base.attempted > 0) {
                    att_dec.push_back(100.0 *
                                      static_cast<double>(base.attempted - r.attempted) /
                                      static_cast<double>(base.attempted));
                }
                if (base.successful > 0) {
                    succ_dec.push_back(100.0 *
                                       static_cast<double>(base.successful - r.successful) /
                                       static_cast<double>(base.successful));
                }
                if (base.final_rmse > 0.0) {
                    rmse_inc.push_back(100.0 * (r.final_rmse - base.final_rmse) /
                                       base.final_rmse);
                }
            }
        }
        if (s.runs_ok > 0) {
            s.attempted_mean = mean_of(attempted);
            s.attempted_std = population_std(attempted);
            s.successful_mean = mean_of(successful);
            s.successful_std = population_std(successful);
            s.median_final_rmse = median(rmses);
        }
        if (!att_dec.empty()) s.median_attempted_decrease_pct = median(att_dec);
        if (!succ_dec.empty()) s.median_successful_decrease_pct = median(succ_dec);
        if (!rmse_inc.empty()) s.median_rmse_increase_pct = median(rmse_inc);
        out.push_back(std::move(s));
    }
    return out;
}

std::string opt_csv(const std::optional<double>& v) {
    return v ? csv_double(*v) : std::string();
}

void write_summary_csv(const std::vector<MethodSummary>& summary, const std::string& path) {
    std::ostringstream out;
    out << "method,runs_ok,runs_failed,attempted_mean,attempted_std,successful_mean,"
           "successful_std,median_final_rmse,median_attempted_decrease_pct,"
           "median_successful_decrease_pct,median_rmse_increase_pct\n";
    for (const auto& s : summary) {
        out << utility_method_name(s.method) << ',' << s.runs_ok << ',' << s.runs_failed << ','
            << csv_double(s.attempted_mean) << ',' << csv_double(s.attempted_std) << ','
            << csv_double(s.successful_mean) << ',' << csv_double(s.successful_std) << ','
            << csv_double(s.median_final_rmse) << ',' << opt_csv(s.median_attempted_decrease_pct)
            << ',' << opt_csv(s.median_successful_decrease_pct) << ','
            << opt_csv(s.median_rmse_increase_pct) << '\n';
    }
    write_text_atomic(path, out.str());
}

ordered_json summary_to_json(const std::vector<MethodSummary>& summary) {
    ordered_json rows = ordered_json::array();
    for (const auto& s : summary) {
        ordered_json row;
        row["method"] = utility_method_name(s.method);
        row["runs_ok"] = s.runs_ok;
        row["runs_failed"] = s.runs_failed;
        row["attempted_mean"] = s.attempted_mean;
        row["attempted_std"] = s.attempted_std;
        row["successful_mean"] = s.successful_mean;
        row["successful_std"] = s.successful_std;
        row["median_final_rmse"] = s.median_final_rmse;
        row["median_attempted_decrease_pct"] =
            s.median_attempted_decrease_pct ? ordered_json(*s.median_attempted_decrease_pct)
                                            : ordered_json(nullptr);
        row["median_successful_decrease_pct"] =
            s.median_successful_decrease_pct ? ordered_json(*s.median_successful_decrease_pct)
                                             : ordered_json(nullptr);
        row["median_rmse_increase_pct"] = s.median_rmse_increase_pct
                                              ? ordered_json(*s.median_rmse_increase_pct)
                                              : ordered_json(nullptr);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

MatrixResult run_matrix(const SimConfig& cfg, const std::string& out_dir, int workers,
                        bool collect_samples) {
    std::vector<RunCell> cells;
    for (const auto& qs : cfg.experiment.quantile_sets) {
        for (int si = 0; si < cfg.experiment.seeds; ++si) {
            // Seed depends on the (quantile set, seed index) cell only, never
            // the method: matched pairs run under common random numbers.
            const std::uint64_t run_seed =
                mix_seed(cfg.seed, fnv1a_hash(qs.name), static_cast<std::uint64_t>(si));
            for (UtilityMethod m : cfg.experiment.methods) {
                cells.push_back(RunCell{m, qs.name, qs.levels, si, run_seed});
            }
        }
    }

    const ordered_json config_echo = sim_config_to_json(cfg);
    MatrixResult result;
    result.runs.resize(cells.size());

    int n_workers = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    n_workers = std::max(1, std::min<int>(n_workers, static_cast<int>(cells.size())));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) break;
            result.runs[i] = execute_cell(cfg, cells[i], out_dir, collect_samples, config_echo);
        }
    };
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    result.summary = summarize(result.runs, cfg.experiment.methods);
    write_summary_csv(result.summary, (fs::path(out_dir) / "summary.csv").string());
    write_text_atomic((fs::path(out_dir) / "summary.json").string(),
                      matrix_report_json(result).dump(2) + "\n");
    return result;
}

nlohmann::ordered_json summary_table_json(const MatrixResult& result) {
    return summary_to_json(result.summary);
}

nlohmann::ordered_json matrix_report_json(const MatrixResult& result) {
    ordered_json report;
    report["summary"] = summary_to_json(result.summary);
    ordered_json failures = ordered_json::array();
    for (const auto& r : result.runs) {
        if (!r.ok) {
            failures.push_back({{"method", utility_method_name(r.cell.method)},
                                {"quantile_set", r.cell.qset_name},
                                {"seed_index", r.cell.seed_index},
                                {"error", r.error}});
        }
    }
    report["failed_runs"] = failures;
    return report;
}

CalibrationResult calibrate(const SimConfig& cfg, double percentile, const std::string& out_dir,
                            int workers) {
    SimConfig calib_cfg = cfg;
    calib_cfg.experiment.methods = {UtilityMethod::Always};
    const MatrixResult runs =
        run_matrix(calib_cfg, (fs::path(out_dir) / "calibration").string(), workers,
                   /*collect_samples=*/true);

    std::vector<double> reward_samples;
    std::vector<double> ego_samples;
    for (const auto& r : runs.runs) {
        if (!r.ok) continue;
        reward_samples.insert(reward_samples.end(), r.observed_reward.begin(),
                              r.observed_reward.end());
        ego_samples.insert(ego_samples.end(), r.observed_ego.begin(), r.observed_ego.end());
    }

    CalibrationResult result;
    result.percentile = percentile;
    result.reward_samples = reward_samples.size();
    result.ego_samples = ego_samples.size();
    result.threshold_reward = calibrate_threshold(std::move(reward_samples), percentile);
    result.threshold_ego = calibrate_threshold(std::move(ego_samples), percentile);

    ordered_json fragment;
    fragment["policy"]["threshold_reward"] = result.threshold_reward;
    fragment["policy"]["threshold_ego"] = result.threshold_ego;
    write_text_atomic((fs::path(out_dir) / "thresholds.json").string(), fragment.dump(2) + "\n");
    return result;
}

namespace {

// Minimal CSV table reader for our own artifacts (no quoting in them).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return static_cast<int>(i);
        }
        return -1;
    }
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        const std::size_t comma = line.find(',', pos);
        const std::size_t end = comma == std::string::npos ? line.size() : comma;
        out.push_back(line.substr(pos, end - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::optional<CsvTable> read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) return std::nullopt;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        table.rows.push_back(split_csv_line(line));
    }
    return table;
}

struct DiskRun {
    std::string method;
    std::string qset;
    int seed_index = 0;
    long attempted = 0;
    long successful = 0;
    double final_rmse = 0.0;
    fs::path dir;
};

std::vector<DiskRun> scan_runs(const std::string& runs_dir) {
    std::vector<DiskRun> out;
    if (!fs::exists(runs_dir)) {
        throw IoError("runs directory does not exist: " + runs_dir);
    }
    for (const auto& entry : fs::recursive_directory_iterator(runs_dir)) {
        if (!entry.is_regular_file() || entry.path().filename() != "summary.json") continue;
        std::ifstream in(entry.path());
        json j;
        try {
            in >> j;
        } catch (const json::exception&) {
            continue;  // not a run summary
        }
        if (!j.contains("method") || !j.contains("final_rmse")) continue;
        DiskRun run;
        run.method = j.at("method").get<std::string>();
        run.qset = j.value("quantile_set", std::string("default"));
        run.seed_index = j.value("seed_index", 0);
        run.attempted = j.value("attempted", 0L);
        run.successful = j.value("successful", 0L);
        run.final_rmse = j.at("final_rmse").get<double>();
        run.dir = entry.path().parent_path();
        out.push_back(std::move(run));
    }
    std::sort(out.begin(), out.end(), [](const DiskRun& a, const DiskRun& b) {
        return std::tie(a.method, a.qset, a.seed_index) <
               std::tie(b.method, b.qset, b.seed_index);
    });
    return out;
}

std::vector<UtilityMethod> methods_present(const std::vector<DiskRun>& runs) {
    std::vector<UtilityMethod> order;
    std::set<std::string> seen;
    for (const auto& r : runs) {
        if (seen.insert(r.method).second) order.push_back(utility_method_from_name(r.method));
    }
    return order;
}

std::vector<RunOutcome> to_outcomes(const std::vector<DiskRun>& runs) {
    std::vector<RunOutcome> out;
    for (const auto& r : runs) {
        RunOutcome o;
        o.cell.method = utility_method_from_name(r.method);
        o.cell.qset_name = r.qset;
        o.cell.seed_index = r.seed_index;
        o.ok = true;
        o.attempted = r.attempted;
        o.successful = r.successful;
        o.final_rmse = r.final_rmse;
        o.dir = r.dir.string();
        out.push_back(std::move(o));
    }
    return out;
}

}  // namespace

nlohmann::ordered_json analyze_runs(const std::string& runs_dir,
                                    const std::string& baseline_dir) {
    const auto disk_runs = scan_runs(runs_dir);
    const auto outcomes = to_outcomes(disk_runs);
    ordered_json report;
    report["runs_dir"] = runs_dir;
    report["run_count"] = disk_runs.size();
    report["summary"] = summary_to_json(summarize(outcomes, methods_present(disk_runs)));

    if (!baseline_dir.empty()) {
        const auto baseline_runs = scan_runs(baseline_dir);
        std::map<std::tuple<std::string, std::string, int>, double> baseline_rmse;
        for (const auto& r : baseline_runs) {
            baseline_rmse[{r.method, r.qset, r.seed_index}] = r.final_rmse;
        }
        ordered_json comparisons = ordered_json::array();
        std::set<std::string> methods;
        for (const auto& r : disk_runs) methods.insert(r.method);
        for (const auto& method : methods) {
            std::vector<double> a, b;
            for (const auto& r : disk_runs) {
                if (r.method != method) continue;
                const auto it = baseline_rmse.find({r.method, r.qset, r.seed_index});
                if (it == baseline_rmse.end()) continue;
                a.push_back(r.final_rmse);
                b.push_back(it->second);
            }
            ordered_json cmp;
            cmp["method"] = method;
            cmp["pairs"] = a.size();
            if (!a.empty()) {
                cmp["median_rmse"] = median(a);
                cmp["median_rmse_baseline"] = median(b);
            }
            if (a.size() >= 6) {
                try {
                    const WilcoxonResult w = wilcoxon_one_sided(a, b);
                    cmp["wilcoxon_w"] = w.w_statistic;
                    cmp["wilcoxon_p_one_sided"] = w.p_value;
                    cmp["wilcoxon_n_effective"] = w.n_effective;
                    cmp["wilcoxon_exact"] = w.exact;
                } catch (const DegenerateInputError& e) {
                    cmp["wilcoxon_error"] = e.what();
                }
            }
            comparisons.push_back(std::move(cmp));
        }
        report["baseline_dir"] = baseline_dir;
        report["rmse_comparisons"] = comparisons;
    }
    return report;
}

void emit_plot_data(const std::string& runs_dir, const std::string& out_dir) {
    const auto disk_runs = scan_runs(runs_dir);
    fs::create_directories(out_dir);
    ordered_json manifest;
    manifest["runs_dir"] = runs_dir;
    manifest["run_count"] = disk_runs.size();
    ordered_json gaps = ordered_json::array();

    // rmse_box.csv: one row per run.
    {
        std::ostringstream out;
        out << "method,quantile_set,seed_index,final_rmse\n";
        for (const auto& r : disk_runs) {
            out << r.method << ',' << r.qset << ',' << r.seed_index << ','
                << csv_double(r.final_rmse) << '\n';
        }
        write_text_atomic((fs::path(out_dir) / "rmse_box.csv").string(), out.str());
    }

    // tradeoff.csv from the pairwise summary.
    {
        const auto summary = summarize(to_outcomes(disk_runs), methods_present(disk_runs));
        std::ostringstream out;
        out << "method,median_attempted_decrease_pct,median_rmse_increase_pct\n";
        for (const auto& s : summary) {
            if (s.method == UtilityMethod::Always) continue;
            out << utility_method_name(s.method) << ','
                << opt_csv(s.median_attempted_decrease_pct) << ','
                << opt_csv(s.median_rmse_increase_pct) << '\n';
        }
        write_text_atomic((fs::path(out_dir) / "tradeoff.csv").string(), out.str());
    }

    // Per-step means across each method's runs.
    std::map<std::string, std::vector<std::vector<double>>> per_method_cum;   // [step][runs]
    std::map<std::string, std::vector<std::vector<double>>> per_method_att;
    std::map<std::string, std::vector<std::vector<double>>> per_method_succ;
    for (const auto& r : disk_runs) {
        const auto table = read_csv(r.dir / "steps.csv");
        if (!table) {
            gaps.push_back({{"dir", r.dir.string()}, {"missing", "steps.csv"}});
            continue;
        }
        const int c_cum = table->column("cum_attempted");
        const int c_att = table->column("step_attempted");
        const int c_succ = table->column("step_successful");
        if (c_cum < 0 || c_att < 0 || c_succ < 0) {
            gaps.push_back({{"dir", r.dir.string()}, {"missing", "steps.csv columns"}});
            continue;
        }
        auto& cum = per_method_cum[r.method];
        auto& att = per_method_att[r.method];
        auto& succ = per_method_succ[r.method];
        for (std::size_t i = 0; i < table->rows.size(); ++i) {
            if (cum.size() <= i) {
                cum.emplace_back();
                att.emplace_back();
                succ.emplace_back();
            }
            cum[i].push_back(std::stod(table->rows[i][static_cast<std::size_t>(c_cum)]));
            att[i].push_back(std::stod(table->rows[i][static_cast<std::size_t>(c_att)]));
            succ[i].push_back(std::stod(table->rows[i][static_cast<std::size_t>(c_succ)]));
        }
    }
    {
        std::ostringstream out;
        out << "method,step,cumulative_attempted_mean\n";
        for (const auto& [method, steps] : per_method_cum) {
            for (std::size_t i = 0; i < steps.size(); ++i) {
                out << method << ',' << (i + 1) << ',' << csv_double(mean_of(steps[i])) << '\n';
            }
        }
        write_text_atomic((fs::path(out_dir) / "cumulative_load.csv").string(), out.str());
    }
    {
        std::ostringstream out;
        out << "method,step,attempted_mean,successful_mean\n";
        for (const auto& [method, steps] : per_method_att) {
            const auto& succ = per_method_succ[method];
            for (std::size_t i = 0; i < steps.size(); ++i) {
                out << method << ',' << (i + 1) << ',' << csv_double(mean_of(steps[i])) << ','
                    << csv_double(mean_of(succ[i])) << '\n';
            }
        }
        write_text_atomic((fs::path(out_dir) / "transmissions.csv").string(), out.str());
    }

    manifest["gaps"] = gaps;
    write_text_atomic((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

}  // namespace quansim
