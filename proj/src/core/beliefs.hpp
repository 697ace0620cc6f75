#pragma once

#include <map>
#include <optional>

#include "gp.hpp"
#include "network.hpp"

namespace quansim {

// The ego robot's model of one teammate: last known location g^j plus the
// measurement set M^j the teammate is believed to hold. The believed GP is
// always fit(M^j); the cache is maintained incrementally and fit lazily on
// first use.
class TeammateBelief {
public:
    TeammateBelief() = default;
    TeammateBelief(int teammate_id, Cell start_location)
        : id_(teammate_id), location_(start_location) {}

    int teammate_id() const { return id_; }
    Cell last_known_location() const { return location_; }
    bool location_fresh() const { return fresh_; }
    const MeasurementSet& believed_data() const { return data_; }

    void set_sensed_location(Cell c) {
        location_ = c;
        fresh_ = true;
    }
    void mark_stale() { fresh_ = false; }

    // Adds measurements to M^j (token dedup applies).
    void merge_believed(const MeasurementSet& extra);

    const GpPosterior& believed_gp(const GpHyperparams& hp, const GridGeometry& grid) const;

private:
    int id_ = -1;
    Cell location_{};
    bool fresh_ = false;
    MeasurementSet data_;
    mutable std::optional<GpPosterior> gp_;  // invariant: equals fit(data_) when present
};

// Location-sensing pass: teammates within `radius` (inclusive) of self_loc are
// sensed exactly and marked fresh; the rest go stale, keeping the last value.
void sense_teammates(Cell self_loc, const std::map<int, Cell>& true_positions, double radius,
                     double cell_size_m, bool radius_in_cells,
                     std::map<int, TeammateBelief>& beliefs);

// Receipt of a message from teammate j: header refreshes g^j, body merges into
// M^j. Throws InvalidArgumentError if the message sender does not match the
// belief (routing error). The caller also merges the body into its own data.
void on_message_received(TeammateBelief& belief, const Message& msg);

// Sender-side belief update after its own broadcast. Default mode applies the
// believed-receipt proxy: M^j gains the message iff j was sensed within radius
// this step. Oracle-handshake mode passes the actual delivery outcome instead.
void on_own_broadcast(TeammateBelief& belief, const Message& msg,
                      std::optional<bool> oracle_success);

}  // namespace quansim
