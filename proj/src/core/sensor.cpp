#include "sensor.hpp"

#include <algorithm>

#include "errors.hpp"

namespace quansim {

void SensorModel::validate() const {
    if (patch_side < 1 || patch_side % 2 == 0) {
        throw InvalidArgumentError("sensor patch_side must be an odd positive integer, got " +
                                   std::to_string(patch_side));
    }
    if (noise_std < 0.0) {
        throw InvalidArgumentError("sensor noise_std must be nonnegative");
    }
}

std::vector<Cell> patch_cells(const GridGeometry& grid, Cell center, int patch_side) {
    const int half = patch_side / 2;
    const int x0 = std::max(0, center.x - half);
    const int x1 = std::min(grid.width - 1, center.x + half);
    const int y0 = std::max(0, center.y - half);
    const int y1 = std::min(grid.height - 1, center.y + half);
    std::vector<Cell> cells;
    cells.reserve(static_cast<std::size_t>(x1 - x0 + 1) * static_cast<std::size_t>(y1 - y0 + 1));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            cells.push_back(Cell{x, y});
        }
    }
    return cells;
}

MeasurementSet sense_patch(const GridField& field, Cell center, const SensorModel& sensor,
                           std::mt19937_64& rng, ProvenanceToken token) {
    sensor.validate();
    if (!field.geometry().contains(center)) {
        throw BoundsError("sense_patch center (" + std::to_string(center.x) + "," +
                          std::to_string(center.y) + ") outside grid");
    }
    std::normal_distribution<double> noise(0.0, sensor.noise_std);
    MeasurementSet out;
    for (Cell c : patch_cells(field.geometry(), center, sensor.patch_side)) {
        const double v = field.at(c) + (sensor.noise_std > 0.0 ? noise(rng) : 0.0);
        out.add(c, v, token);
    }
    return out;
}

}  // namespace quansim
