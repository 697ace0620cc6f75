#include "grid_field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "errors.hpp"

namespace quansim {

GridField::GridField(int width, int height, std::vector<double> values, double cell_size_m)
    : geom_{width, height}, values_(std::move(values)), cell_size_m_(cell_size_m) {
    if (width < 1 || height < 1) {
        throw ShapeError("GridField dimensions must be positive, got " + std::to_string(width) +
                         "x" + std::to_string(height));
    }
    if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw ShapeError("GridField value count " + std::to_string(values_.size()) +
                         " does not match " + std::to_string(width) + "x" + std::to_string(height));
    }
    if (cell_size_m_ <= 0.0) {
        throw InvalidArgumentError("cell_size_m must be positive");
    }
    for (double v : values_) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw InvalidArgumentError("GridField values must be finite and in [0,1], got " +
                                       std::to_string(v));
        }
    }
}

QuantileSet::QuantileSet(std::vector<double> levels) : levels_(std::move(levels)) {
    if (levels_.empty()) {
        throw InvalidArgumentError("QuantileSet must not be empty");
    }
    double prev = 0.0;
    for (double p : levels_) {
        if (!(p > 0.0 && p < 1.0)) {
            throw InvalidArgumentError("quantile level must lie in (0,1), got " +
                                       std::to_string(p));
        }
        if (p <= prev) {
            throw InvalidArgumentError("quantile levels must be strictly increasing");
        }
        prev = p;
    }
}

double sorted_quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) {
        throw ShapeError("quantile of empty sample");
    }
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = static_cast<double>(n - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double empirical_quantile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    return sorted_quantile(values, p);
}

std::vector<double> empirical_quantiles(const std::vector<double>& values, const QuantileSet& q) {
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    out.reserve(q.size());
    for (double p : q.levels()) out.push_back(sorted_quantile(sorted, p));
    return out;
}

std::vector<double> true_quantiles(const GridField& field, const QuantileSet& q) {
    return empirical_quantiles(field.values(), q);
}

double rmse(const std::vector<double>& estimates, const std::vector<double>& truth) {
    if (estimates.size() != truth.size()) {
        throw ShapeError("rmse length mismatch: " + std::to_string(estimates.size()) + " vs " +
                         std::to_string(truth.size()));
    }
    if (estimates.empty()) {
        throw ShapeError("rmse of empty vectors");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const double d = estimates[i] - truth[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(estimates.size()));
}

}  // namespace quansim
