#pragma once

#include <cstdint>
#include <string>

#include "grid_field.hpp"

namespace quansim {

enum class SyntheticKind { GaussianBlobs, SmoothedNoise };

SyntheticKind synthetic_kind_from_name(const std::string& name);  // throws InvalidArgumentError
const char* synthetic_kind_name(SyntheticKind kind);

// Deterministic synthetic field generator. Output is min-max normalized so the
// minimum is exactly 0 and the maximum exactly 1. Requires width, height >= 5.
GridField generate_synthetic(SyntheticKind kind, int width, int height, std::uint64_t seed,
                             double cell_size_m = 3.2);

}  // namespace quansim
