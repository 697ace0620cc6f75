#pragma once

#include <vector>

#include "geometry.hpp"

namespace quansim {

// Discretized scalar field over a rectangular grid. Values are stored row-major
// (row y is contiguous) and are expected to lie in [0, 1] after normalization.
class GridField {
public:
    GridField() = default;
    // Throws ShapeError on empty dims, InvalidArgumentError on non-finite or
    // out-of-range values.
    GridField(int width, int height, std::vector<double> values, double cell_size_m = 3.2);

    int width() const { return geom_.width; }
    int height() const { return geom_.height; }
    const GridGeometry& geometry() const { return geom_; }
    double cell_size_m() const { return cell_size_m_; }

    double at(Cell c) const { return values_[geom_.index_of(c)]; }
    const std::vector<double>& values() const { return values_; }

private:
    GridGeometry geom_{};
    std::vector<double> values_;
    double cell_size_m_ = 3.2;
};

// Strictly increasing quantile levels, each in the open interval (0, 1).
class QuantileSet {
public:
    QuantileSet() = default;
    explicit QuantileSet(std::vector<double> levels);  // validates, throws InvalidArgumentError

    const std::vector<double>& levels() const { return levels_; }
    std::size_t size() const { return levels_.size(); }

private:
    std::vector<double> levels_;
};

// Empirical quantile with linear interpolation between order statistics
// (h = (n-1)p, interpolate x[floor(h)]..x[floor(h)+1]). This single rule is
// used for true values, estimates, and threshold calibration alike.
double sorted_quantile(const std::vector<double>& sorted, double p);
double empirical_quantile(std::vector<double> values, double p);  // copies + sorts
std::vector<double> empirical_quantiles(const std::vector<double>& values, const QuantileSet& q);

std::vector<double> true_quantiles(const GridField& field, const QuantileSet& q);

// Root mean squared error; throws ShapeError on length mismatch or empty input.
double rmse(const std::vector<double>& estimates, const std::vector<double>& truth);

}  // namespace quansim
