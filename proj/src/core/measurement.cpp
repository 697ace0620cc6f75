#include "measurement.hpp"

namespace quansim {

void MeasurementSet::add(Cell location, double value, ProvenanceToken token) {
    locations_.push_back(location);
    values_.push_back(value);
    tokens_.push_back(token);
    keys_.insert(measurement_key(token, location));
}

std::size_t MeasurementSet::merge_unique(const MeasurementSet& other) {
    std::size_t added = 0;
    for (std::size_t i = 0; i < other.size(); ++i) {
        const auto key = measurement_key(other.tokens_[i], other.locations_[i]);
        if (keys_.insert(key).second) {
            locations_.push_back(other.locations_[i]);
            values_.push_back(other.values_[i]);
            tokens_.push_back(other.tokens_[i]);
            ++added;
        }
    }
    return added;
}

MeasurementSet MeasurementSet::deduplicated() const {
    MeasurementSet out;
    for (std::size_t i = 0; i < size(); ++i) {
        const auto key = measurement_key(tokens_[i], locations_[i]);
        if (out.keys_.insert(key).second) {
            out.locations_.push_back(locations_[i]);
            out.values_.push_back(values_[i]);
            out.tokens_.push_back(tokens_[i]);
        }
    }
    return out;
}

}  // namespace quansim
