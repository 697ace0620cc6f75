#pragma once

#include <string>

#include "grid_field.hpp"

namespace quansim {

// Loads a CSV matrix (one row per line, comma separated) or a PGM (P2/P5)
// raster. Format is chosen by content: a leading "P2"/"P5" magic selects PGM.
// Row 0 of the file becomes grid row y=0 (row-major, top line first).
//
// PGM pixel values are scaled by 1/maxval into [0,1]. CSV values are taken
// as-is and must already lie in [0,1] unless `normalize` is set. With
// `normalize`, values are min-max rescaled to [0,1]; a constant input maps to
// all zeros.
GridField load_raster(const std::string& path, bool normalize, double cell_size_m = 3.2);

// CSV export with full round-trip precision; save followed by load_raster
// (normalize=false) reproduces the field bit-exactly.
void save_csv(const GridField& field, const std::string& path);

}  // namespace quansim
