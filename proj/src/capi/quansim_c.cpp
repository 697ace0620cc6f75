#include "quansim/quansim.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "../core/errors.hpp"
#include "../core/harness.hpp"
#include "../core/raster_io.hpp"
#include "../core/runlog_io.hpp"
#include "../core/sim_config.hpp"
#include "../core/stats.hpp"
#include "../core/synthetic.hpp"

namespace {

thread_local qs_status g_last_status = QS_OK;
thread_local std::string g_last_error;

void set_error(qs_status status, const std::string& message) {
    g_last_status = status;
    g_last_error = message;
}

void clear_error() {
    g_last_status = QS_OK;
    g_last_error.clear();
}

qs_status status_of(const quansim::Error& e) {
    using quansim::ErrorCode;
    switch (e.code()) {
        case ErrorCode::InvalidArgument: return QS_ERR_INVALID_ARGUMENT;
        case ErrorCode::Parse: return QS_ERR_PARSE;
        case ErrorCode::Io: return QS_ERR_IO;
        case ErrorCode::Shape: return QS_ERR_SHAPE;
        case ErrorCode::Bounds: return QS_ERR_BOUNDS;
        case ErrorCode::Numeric: return QS_ERR_NUMERIC;
        case ErrorCode::Placement: return QS_ERR_PLACEMENT;
        case ErrorCode::Degenerate: return QS_ERR_DEGENERATE;
    }
    return QS_ERR_INTERNAL;
}

// Runs `fn`, translating exceptions into the thread-local error state.
template <typename Fn>
qs_status guarded(Fn&& fn) {
    try {
        fn();
        clear_error();
        return QS_OK;
    } catch (const quansim::Error& e) {
        set_error(status_of(e), e.what());
    } catch (const std::bad_alloc&) {
        set_error(QS_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        set_error(QS_ERR_INTERNAL, e.what());
    } catch (...) {
        set_error(QS_ERR_INTERNAL, "unknown error");
    }
    return g_last_status;
}

qs_status invalid(const char* message) {
    set_error(QS_ERR_INVALID_ARGUMENT, message);
    return QS_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

struct qs_field {
    quansim::GridField field;
};

struct qs_config {
    quansim::SimConfig config;
};

struct qs_run {
    quansim::RunLog log;
    int num_robots = 0;
    nlohmann::ordered_json metadata;
    nlohmann::ordered_json config_echo;
};

extern "C" {

const char* qs_version(void) { return "1.0.0"; }

qs_status qs_last_status(void) { return g_last_status; }

const char* qs_last_error(void) { return g_last_error.c_str(); }

void qs_string_free(char* s) { std::free(s); }

qs_status qs_field_load_raster(const char* path, int normalize, qs_field** out) {
    if (path == nullptr || out == nullptr) return invalid("path and out must be non-NULL");
    return guarded([&] {
        auto handle = std::make_unique<qs_field>();
        handle->field = quansim::load_raster(path, normalize != 0);
        *out = handle.release();
    });
}

qs_status qs_field_generate(const char* kind, int width, int height, uint64_t seed,
                            qs_field** out) {
    if (kind == nullptr || out == nullptr) return invalid("kind and out must be non-NULL");
    return guarded([&] {
        auto handle = std::make_unique<qs_field>();
        handle->field = quansim::generate_synthetic(quansim::synthetic_kind_from_name(kind),
                                                    width, height, seed);
        *out = handle.release();
    });
}

qs_status qs_field_save_csv(const qs_field* field, const char* path) {
    if (field == nullptr || path == nullptr) return invalid("field and path must be non-NULL");
    return guarded([&] { quansim::save_csv(field->field, path); });
}

int qs_field_width(const qs_field* field) { return field != nullptr ? field->field.width() : 0; }

int qs_field_height(const qs_field* field) {
    return field != nullptr ? field->field.height() : 0;
}

double qs_field_value(const qs_field* field, int x, int y) {
    if (field == nullptr || !field->field.geometry().contains(quansim::Cell{x, y})) return -1.0;
    return field->field.at(quansim::Cell{x, y});
}

qs_status qs_field_true_quantiles(const qs_field* field, const double* levels, size_t n_levels,
                                  double* out_values) {
    if (field == nullptr || levels == nullptr || out_values == nullptr || n_levels == 0) {
        return invalid("field, levels, out_values must be non-NULL and n_levels > 0");
    }
    return guarded([&] {
        const quansim::QuantileSet q(std::vector<double>(levels, levels + n_levels));
        const auto values = quansim::true_quantiles(field->field, q);
        for (size_t i = 0; i < values.size(); ++i) out_values[i] = values[i];
    });
}

void qs_field_free(qs_field* field) { delete field; }

qs_status qs_config_default(qs_config** out) {
    if (out == nullptr) return invalid("out must be non-NULL");
    return guarded([&] { *out = new qs_config(); });
}

qs_status qs_config_from_json(const char* json_text, qs_config** out) {
    if (json_text == nullptr || out == nullptr) {
        return invalid("json_text and out must be non-NULL");
    }
    return guarded([&] {
        auto handle = std::make_unique<qs_config>();
        handle->config = quansim::sim_config_from_string(json_text);
        *out = handle.release();
    });
}

qs_status qs_config_from_file(const char* path, qs_config** out) {
    if (path == nullptr || out == nullptr) return invalid("path and out must be non-NULL");
    return guarded([&] {
        auto handle = std::make_unique<qs_config>();
        handle->config = quansim::sim_config_from_file(path);
        *out = handle.release();
    });
}

qs_status qs_config_merge_json(qs_config* config, const char* json_text) {
    if (config == nullptr || json_text == nullptr) {
        return invalid("config and json_text must be non-NULL");
    }
    return guarded(
        [&] { config->config = quansim::sim_config_merged(config->config, json_text); });
}

char* qs_config_to_json(const qs_config* config) {
    if (config == nullptr) return nullptr;
    return dup_string(quansim::sim_config_to_json(config->config).dump(2) + "\n");
}

const char* qs_config_schema(void) {
    static const std::string schema = quansim::sim_config_schema();
    return schema.c_str();
}

void qs_config_free(qs_config* config) { delete config; }

qs_status qs_run_execute(const qs_config* config, const qs_field* field, qs_run** out) {
    if (config == nullptr || out == nullptr) return invalid("config and out must be non-NULL");
    return guarded([&] {
        const quansim::SimConfig& cfg = config->config;
        const quansim::GridField grid_field =
            field != nullptr ? field->field : cfg.make_field(cfg.seed);
        const quansim::TeamConfig tc = cfg.team_config(cfg.method, cfg.quantiles, cfg.seed);
        auto handle = std::make_unique<qs_run>();
        handle->log = quansim::run_mission(tc, grid_field);
        handle->num_robots = cfg.num_robots;
        handle->metadata["method"] = quansim::utility_method_name(cfg.method);
        handle->metadata["quantile_levels"] = cfg.quantiles;
        handle->metadata["run_seed"] = cfg.seed;
        handle->metadata["oracle_handshake"] = cfg.network.oracle_handshake;
        handle->metadata["threshold"] = cfg.threshold_for(cfg.method);
        handle->config_echo = quansim::sim_config_to_json(cfg);
        *out = handle.release();
    });
}

int qs_run_step_count(const qs_run* run) {
    return run != nullptr ? static_cast<int>(run->log.steps.size()) : 0;
}

long qs_run_attempted(const qs_run* run) {
    return run != nullptr ? run->log.total_attempted : 0;
}

long qs_run_successful(const qs_run* run) {
    return run != nullptr ? run->log.total_successful : 0;
}

double qs_run_final_rmse(const qs_run* run) {
    return run != nullptr ? run->log.final_rmse : -1.0;
}

qs_status qs_run_final_estimates(const qs_run* run, double* out_values, size_t cap,
                                 size_t* out_count) {
    if (run == nullptr || out_values == nullptr || out_count == nullptr) {
        return invalid("run, out_values, out_count must be non-NULL");
    }
    return guarded([&] {
        const auto& est = run->log.final_estimates;
        const size_t n = est.size() < cap ? est.size() : cap;
        for (size_t i = 0; i < n; ++i) out_values[i] = est[i];
        *out_count = n;
    });
}

qs_status qs_run_write_artifacts(const qs_run* run, const char* dir) {
    if (run == nullptr || dir == nullptr) return invalid("run and dir must be non-NULL");
    return guarded([&] {
        quansim::write_run_artifacts(run->log, run->num_robots, dir, run->metadata,
                                     run->config_echo);
    });
}

char* qs_run_summary_json(const qs_run* run) {
    if (run == nullptr) return nullptr;
    return dup_string(
        quansim::run_summary_json(run->log, run->metadata, run->config_echo).dump(2) + "\n");
}

void qs_run_free(qs_run* run) { delete run; }

qs_status qs_matrix_execute(const qs_config* config, const char* out_dir, int workers,
                            char** report_json) {
    if (config == nullptr || out_dir == nullptr) {
        return invalid("config and out_dir must be non-NULL");
    }
    return guarded([&] {
        const quansim::MatrixResult result =
            quansim::run_matrix(config->config, out_dir, workers);
        if (report_json != nullptr) {
            *report_json = dup_string(quansim::matrix_report_json(result).dump(2) + "\n");
        }
    });
}

qs_status qs_calibrate_execute(const qs_config* config, double percentile, const char* out_dir,
                               int workers, char** thresholds_json) {
    if (config == nullptr || out_dir == nullptr) {
        return invalid("config and out_dir must be non-NULL");
    }
    return guarded([&] {
        const quansim::CalibrationResult result =
            quansim::calibrate(config->config, percentile, out_dir, workers);
        if (thresholds_json != nullptr) {
            nlohmann::ordered_json j;
            j["percentile"] = result.percentile;
            j["threshold_reward"] = result.threshold_reward;
            j["threshold_ego"] = result.threshold_ego;
            j["reward_samples"] = result.reward_samples;
            j["ego_samples"] = result.ego_samples;
            *thresholds_json = dup_string(j.dump(2) + "\n");
        }
    });
}

qs_status qs_analyze_runs(const char* runs_dir, const char* baseline_dir, char** report_json) {
    if (runs_dir == nullptr) return invalid("runs_dir must be non-NULL");
    return guarded([&] {
        const auto report = quansim::analyze_runs(
            runs_dir, baseline_dir != nullptr ? baseline_dir : std::string());
        if (report_json != nullptr) {
            *report_json = dup_string(report.dump(2) + "\n");
        }
    });
}

qs_status qs_emit_plot_data(const char* runs_dir, const char* out_dir) {
    if (runs_dir == nullptr || out_dir == nullptr) {
        return invalid("runs_dir and out_dir must be non-NULL");
    }
    return guarded([&] { quansim::emit_plot_data(runs_dir, out_dir); });
}

qs_status qs_wilcoxon_one_sided(const double* a, const double* b, size_t n, double* w_statistic,
                                double* p_value) {
    if (a == nullptr || b == nullptr || w_statistic == nullptr || p_value == nullptr) {
        return invalid("a, b, w_statistic, p_value must be non-NULL");
    }
    return guarded([&] {
        const quansim::WilcoxonResult result = quansim::wilcoxon_one_sided(
            std::vector<double>(a, a + n), std::vector<double>(b, b + n));
        *w_statistic = result.w_statistic;
        *p_value = result.p_value;
    });
}

}  // extern "C"
