#pragma once

#include <map>
#include <optional>
#include <random>

#include "measurement.hpp"

namespace quansim {

// Broadcast message: header (sender id, sender location, timestep) plus the
// sender's newest measurement patch. Body tokens all carry (sender, timestep).
struct Message {
    int sender_id = 0;
    Cell sender_location{};
    int timestep = 0;
    MeasurementSet body;
};

struct DeliveryEntry {
    int recipient = 0;
    bool attempted = false;
    bool success = false;
    double distance_m = 0.0;
    double probability = 0.0;
};

struct DeliveryReport {
    std::vector<DeliveryEntry> entries;  // ascending recipient id

    long attempted_count() const;
    long success_count() const;
    std::optional<bool> success_for(int recipient) const;
};

struct NetworkConfig {
    double eta = 0.4;
    double radius = 15.0;          // meters unless radius_in_cells
    bool oracle_handshake = false;
    bool radius_in_cells = false;

    void validate() const;  // throws InvalidArgumentError
};

// Sigmoid channel: 1 / (1 + exp(eta * (distance - radius))).
double p_success(double distance, double eta, double radius);

// One independent Bernoulli delivery draw per recipient, consumed in
// ascending recipient-id order. Distances are Euclidean in meters
// (cell coordinates scaled by cell_size_m), or in cells when
// cfg.radius_in_cells is set. There is no distance cutoff.
DeliveryReport broadcast(const Message& msg, Cell sender_loc,
                         const std::map<int, Cell>& recipient_locs, const NetworkConfig& cfg,
                         double cell_size_m, std::mt19937_64& rng);

// Oracle mode returns the exact per-recipient success map; the default
// no-handshake mode returns nothing. Pure read of the report.
std::optional<std::map<int, bool>> handshake_outcomes(const DeliveryReport& report,
                                                      const NetworkConfig& cfg);

}  // namespace quansim
