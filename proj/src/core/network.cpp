#include "network.hpp"

#include <cmath>

#include "errors.hpp"

namespace quansim {

long DeliveryReport::attempted_count() const {
    long n = 0;
    for (const auto& e : entries) n += e.attempted ? 1 : 0;
    return n;
}

long DeliveryReport::success_count() const {
    long n = 0;
    for (const auto& e : entries) n += e.success ? 1 : 0;
    return n;
}

std::optional<bool> DeliveryReport::success_for(int recipient) const {
    for (const auto& e : entries) {
        if (e.recipient == recipient) return e.success;
    }
    return std::nullopt;
}

void NetworkConfig::validate() const {
    if (!(eta > 0.0)) throw InvalidArgumentError("network eta must be > 0");
    if (!(radius > 0.0)) throw InvalidArgumentError("network radius must be > 0");
}

double p_success(double distance, double eta, double radius) {
    return 1.0 / (1.0 + std::exp(eta * (distance - radius)));
}

DeliveryReport broadcast(const Message& msg, Cell sender_loc,
                         const std::map<int, Cell>& recipient_locs, const NetworkConfig& cfg,
                         double cell_size_m, std::mt19937_64& rng) {
    cfg.validate();
    if (recipient_locs.count(msg.sender_id) > 0) {
        throw InvalidArgumentError("broadcast recipient set must exclude the sender");
    }
    const double scale = cfg.radius_in_cells ? 1.0 : cell_size_m;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    DeliveryReport report;
    report.entries.reserve(recipient_locs.size());
    for (const auto& [id, loc] : recipient_locs) {  // std::map iterates ids ascending
        DeliveryEntry e;
        e.recipient = id;
        e.attempted = true;
        e.distance_m = distance_cells(sender_loc, loc) * scale;
        e.probability = p_success(e.distance_m, cfg.eta, cfg.radius);
        e.success = unit(rng) < e.probability;
        report.entries.push_back(e);
    }
    return report;
}

std::optional<std::map<int, bool>> handshake_outcomes(const DeliveryReport& report,
                                                      const NetworkConfig& cfg) {
    if (!cfg.oracle_handshake) return std::nullopt;
    std::map<int, bool> outcomes;
    for (const auto& e : report.entries) outcomes[e.recipient] = e.success;
    return outcomes;
}

}  // namespace quansim
