#pragma once

#include <random>
#include <vector>

#include "grid_field.hpp"
#include "measurement.hpp"

namespace quansim {

// Square patch sensor: patch_side x patch_side block of cells centered on the
// robot, each reading corrupted by independent zero-mean Gaussian noise.
struct SensorModel {
    int patch_side = 5;      // odd, so the patch centers on the robot cell
    double noise_std = 0.05;

    void validate() const;  // throws InvalidArgumentError
};

// Patch footprint centered at `center`, clipped at the grid borders (cells
// near an edge yield smaller patches; nothing is reflected or fabricated).
// Cells are enumerated row-major (y outer, x inner).
std::vector<Cell> patch_cells(const GridGeometry& grid, Cell center, int patch_side);

// Ground truth plus one Gaussian(0, noise_std) draw per cell, in patch_cells
// order. Values are not clamped; noise may leave [0,1]. Every entry is stamped
// with the caller-supplied token. Throws BoundsError if center is outside.
MeasurementSet sense_patch(const GridField& field, Cell center, const SensorModel& sensor,
                           std::mt19937_64& rng, ProvenanceToken token);

}  // namespace quansim
