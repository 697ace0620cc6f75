// quansim command-line harness. Talks to the simulator exclusively through the
// C API in quansim/quansim.h; argument parsing and error JSON live here.

#include <CLI11.hpp>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <string>

#include "quansim/quansim.h"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string overrides;  // inline JSON overrides
    long seed = -1;
    std::string method;
    std::string out_dir = "out";
    int workers = 0;
    bool oracle_handshake = false;
};

// Prints machine-readable error JSON to stderr; exit code mirrors the status.
int fail(qs_status status, const std::string& where) {
    nlohmann::ordered_json err;
    err["error"]["status"] = static_cast<int>(status);
    err["error"]["where"] = where;
    err["error"]["message"] = qs_last_error();
    std::fprintf(stderr, "%s\n", err.dump(2).c_str());
    return static_cast<int>(status);
}

int fail_here(const std::string& where) { return fail(qs_last_status(), where); }

// Builds the effective config from file + CLI overrides. Returns nullptr and
// prints error JSON on failure.
qs_config* build_config(const CommonArgs& args) {
    qs_config* cfg = nullptr;
    qs_status status = args.config_path.empty() ? qs_config_default(&cfg)
                                                : qs_config_from_file(args.config_path.c_str(), &cfg);
    if (status != QS_OK) {
        fail(status, "config");
        return nullptr;
    }
    nlohmann::ordered_json patch;
    if (args.seed >= 0) patch["team"]["seed"] = args.seed;
    if (!args.method.empty()) patch["policy"]["method"] = args.method;
    if (args.oracle_handshake) patch["network"]["oracle_handshake"] = true;
    if (!patch.empty()) {
        status = qs_config_merge_json(cfg, patch.dump().c_str());
        if (status != QS_OK) {
            fail(status, "config overrides");
            qs_config_free(cfg);
            return nullptr;
        }
    }
    if (!args.overrides.empty()) {
        status = qs_config_merge_json(cfg, args.overrides.c_str());
        if (status != QS_OK) {
            fail(status, "--set overrides");
            qs_config_free(cfg);
            return nullptr;
        }
    }
    return cfg;
}

void add_common_options(CLI::App* cmd, CommonArgs& args, bool with_out = true) {
    cmd->add_option("-c,--config", args.config_path, "Config file (JSON; see --print-schema)");
    cmd->add_option("--set", args.overrides, "Inline JSON config overrides");
    cmd->add_option("-s,--seed", args.seed, "Master seed override");
    cmd->add_option("-m,--method", args.method,
                    "Utility method: always|never|reward|action|ego_reward");
    cmd->add_flag("--oracle-handshake", args.oracle_handshake,
                  "Enable exact delivery confirmation to the sender");
    if (with_out) cmd->add_option("-o,--out", args.out_dir, "Output directory");
    cmd->add_option("-w,--workers", args.workers, "Worker threads (0 = all cores)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quansim: multirobot quantile-estimation simulator with utility-gated comms"};
    app.require_subcommand(0, 1);
    bool print_schema = false;
    app.add_flag("--print-schema", print_schema, "Print the config schema and exit");
    bool version = false;
    app.add_flag("--version", version, "Print version and exit");

    CommonArgs run_args, matrix_args, calib_args;
    std::string run_field_path;
    bool run_no_artifacts = false;
    auto* run_cmd = app.add_subcommand("run", "Execute a single mission and print its summary");
    add_common_options(run_cmd, run_args);
    run_cmd->add_option("--field", run_field_path, "Raster file to use instead of the config field");
    run_cmd->add_flag("--no-artifacts", run_no_artifacts, "Skip writing steps/delivery/summary files");

    auto* matrix_cmd =
        app.add_subcommand("matrix", "Run the full (method x quantile set x seed) experiment matrix");
    add_common_options(matrix_cmd, matrix_args);

    double calib_percentile = 0.25;
    auto* calib_cmd = app.add_subcommand(
        "calibrate", "Calibrate decision thresholds from Always-policy observation runs");
    add_common_options(calib_cmd, calib_args);
    calib_cmd->add_option("-p,--percentile", calib_percentile,
                          "Percentile of observed finite utilities (default 0.25)");

    std::string analyze_runs_dir, analyze_baseline_dir;
    auto* analyze_cmd =
        app.add_subcommand("analyze", "Summary table and optional paired Wilcoxon comparison");
    analyze_cmd->add_option("-r,--runs", analyze_runs_dir, "Run artifacts directory")->required();
    analyze_cmd->add_option("-b,--baseline", analyze_baseline_dir,
                            "Baseline run directory for the paired RMSE comparison");

    std::string plots_runs_dir, plots_out_dir = "plots";
    auto* plots_cmd = app.add_subcommand("emit-plots", "Emit plot-ready CSV files from run artifacts");
    plots_cmd->add_option("-r,--runs", plots_runs_dir, "Run artifacts directory")->required();
    plots_cmd->add_option("-o,--out", plots_out_dir, "Plot data output directory");

    CLI11_PARSE(app, argc, argv);

    if (version) {
        std::printf("quansim %s\n", qs_version());
        return 0;
    }
    if (print_schema) {
        std::fputs(qs_config_schema(), stdout);
        return 0;
    }

    if (run_cmd->parsed()) {
        qs_config* cfg = build_config(run_args);
        if (cfg == nullptr) return static_cast<int>(qs_last_status());
        qs_field* field = nullptr;
        if (!run_field_path.empty()) {
            if (qs_field_load_raster(run_field_path.c_str(), 1, &field) != QS_OK) {
                qs_config_free(cfg);
                return fail_here("field");
            }
        }
        qs_run* run = nullptr;
        const qs_status status = qs_run_execute(cfg, field, &run);
        if (status != QS_OK) {
            qs_field_free(field);
            qs_config_free(cfg);
            return fail(status, "run");
        }
        if (!run_no_artifacts) {
            if (qs_run_write_artifacts(run, run_args.out_dir.c_str()) != QS_OK) {
                const int code = fail_here("artifacts");
                qs_run_free(run);
                qs_field_free(field);
                qs_config_free(cfg);
                return code;
            }
        }
        char* summary = qs_run_summary_json(run);
        if (summary != nullptr) {
            std::fputs(summary, stdout);
            qs_string_free(summary);
        }
        qs_run_free(run);
        qs_field_free(field);
        qs_config_free(cfg);
        return 0;
    }

    if (matrix_cmd->parsed()) {
        qs_config* cfg = build_config(matrix_args);
        if (cfg == nullptr) return static_cast<int>(qs_last_status());
        char* report = nullptr;
        const qs_status status =
            qs_matrix_execute(cfg, matrix_args.out_dir.c_str(), matrix_args.workers, &report);
        qs_config_free(cfg);
        if (status != QS_OK) return fail(status, "matrix");
        if (report != nullptr) {
            std::fputs(report, stdout);
            qs_string_free(report);
        }
        return 0;
    }

    if (calib_cmd->parsed()) {
        qs_config* cfg = build_config(calib_args);
        if (cfg == nullptr) return static_cast<int>(qs_last_status());
        char* thresholds = nullptr;
        const qs_status status = qs_calibrate_execute(cfg, calib_percentile,
                                                      calib_args.out_dir.c_str(),
                                                      calib_args.workers, &thresholds);
        qs_config_free(cfg);
        if (status != QS_OK) return fail(status, "calibrate");
        if (thresholds != nullptr) {
            std::fputs(thresholds, stdout);
            qs_string_free(thresholds);
        }
        return 0;
    }

    if (analyze_cmd->parsed()) {
        char* report = nullptr;
        const qs_status status = qs_analyze_runs(
            analyze_runs_dir.c_str(),
            analyze_baseline_dir.empty() ? nullptr : analyze_baseline_dir.c_str(), &report);
        if (status != QS_OK) return fail(status, "analyze");
        if (report != nullptr) {
            std::fputs(report, stdout);
            qs_string_free(report);
        }
        return 0;
    }

    if (plots_cmd->parsed()) {
        const qs_status status =
            qs_emit_plot_data(plots_runs_dir.c_str(), plots_out_dir.c_str());
        if (status != QS_OK) return fail(status, "emit-plots");
        return 0;
    }

    std::fputs(app.help().c_str(), stdout);
    return 0;
}
