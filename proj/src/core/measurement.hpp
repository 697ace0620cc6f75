#pragma once

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "geometry.hpp"

namespace quansim {

// Identifies the sensing event that produced a measurement: who sensed it and
// when. All cells of one patch share the same token; (token, location) is the
// identity of a single scalar reading, so forwarded copies deduplicate while
// repeated noisy readings of the same cell do not.
struct ProvenanceToken {
    int robot_id = 0;
    int timestep = 0;

    friend bool operator==(const ProvenanceToken& a, const ProvenanceToken& b) {
        return a.robot_id == b.robot_id && a.timestep == b.timestep;
    }
};

// Packed dedup key over (robot, timestep, x, y). Field widths cover any
// configuration this simulator accepts.
inline std::uint64_t measurement_key(const ProvenanceToken& t, Cell c) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.robot_id) & 0xFFFu) << 52) |
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.timestep) & 0xFFFFFFu) << 28) |
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.x) & 0x3FFFu) << 14) |
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.y) & 0x3FFFu));
}

// Parallel-array collection of scalar measurements. Append-only.
class MeasurementSet {
public:
    MeasurementSet() = default;

    void add(Cell location, double value, ProvenanceToken token);

    // Appends entries of `other` whose (token, location) key is not already
    // present. Returns the number of entries added.
    std::size_t merge_unique(const MeasurementSet& other);

    // Copy of this set with internal duplicates removed (first occurrence wins).
    MeasurementSet deduplicated() const;

    bool contains(const ProvenanceToken& t, Cell c) const {
        return keys_.count(measurement_key(t, c)) > 0;
    }

    std::size_t size() const { return locations_.size(); }
    bool empty() const { return locations_.empty(); }

    const std::vector<Cell>& locations() const { return locations_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<ProvenanceToken>& tokens() const { return tokens_; }

private:
    std::vector<Cell> locations_;
    std::vector<double> values_;
    std::vector<ProvenanceToken> tokens_;
    std::unordered_set<std::uint64_t> keys_;
};

}  // namespace quansim
