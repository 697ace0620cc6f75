#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace quansim {

// Named randomness concerns. Every draw in a run comes from a substream keyed
// by (master seed, purpose, step index), so changing one concern (e.g. a
// decision policy sends fewer messages) never shifts the draws of another.
// Runs with the same master seed therefore share placements, fields, and
// sensor noise across decision policies.
enum class RngPurpose : std::uint64_t {
    Placement = 1,
    SensorNoise = 2,
    Delivery = 3,
    TieBreak = 4,
    Field = 5,
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    s ^= a * 0x9E3779B97F4A7C15ull;
    h ^= splitmix64(s);
    s ^= b + 0x165667B19E3779F9ull;
    h ^= splitmix64(s);
    return h;
}

inline std::mt19937_64 substream(std::uint64_t master, RngPurpose purpose, std::uint64_t index = 0) {
    return std::mt19937_64(mix_seed(master, static_cast<std::uint64_t>(purpose), index));
}

// FNV-1a; stable name-keyed seeding independent of declaration order.
inline std::uint64_t fnv1a_hash(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace quansim
