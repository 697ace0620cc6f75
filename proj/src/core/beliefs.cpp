#include "beliefs.hpp"

#include "errors.hpp"

namespace quansim {

void TeammateBelief::merge_believed(const MeasurementSet& extra) {
    if (data_.merge_unique(extra) > 0 && gp_) {
        gp_ = gp_->extended(extra);
    }
}

const GpPosterior& TeammateBelief::believed_gp(const GpHyperparams& hp,
                                               const GridGeometry& grid) const {
    if (!gp_) {
        gp_ = GpPosterior::fit(data_, hp, grid);
    }
    return *gp_;
}

void sense_teammates(Cell self_loc, const std::map<int, Cell>& true_positions, double radius,
                     double cell_size_m, bool radius_in_cells,
                     std::map<int, TeammateBelief>& beliefs) {
    const double scale = radius_in_cells ? 1.0 : cell_size_m;
    for (auto& [id, belief] : beliefs) {
        const auto it = true_positions.find(id);
        if (it == true_positions.end()) {
            belief.mark_stale();
            continue;
        }
        if (distance_cells(self_loc, it->second) * scale <= radius) {
            belief.set_sensed_location(it->second);
        } else {
            belief.mark_stale();
        }
    }
}

void on_message_received(TeammateBelief& belief, const Message& msg) {
    if (msg.sender_id != belief.teammate_id()) {
        throw InvalidArgumentError("message from robot " + std::to_string(msg.sender_id) +
                                   " routed to belief about robot " +
                                   std::to_string(belief.teammate_id()));
    }
    belief.set_sensed_location(msg.sender_location);
    belief.merge_believed(msg.body);
}

void on_own_broadcast(TeammateBelief& belief, const Message& msg,
                      std::optional<bool> oracle_success) {
    const bool believed_received = oracle_success ? *oracle_success : belief.location_fresh();
    if (believed_received) {
        belief.merge_believed(msg.body);
    }
}

}  // namespace quansim
