#include <doctest.h>

#include "beliefs.hpp"
#include "errors.hpp"

using namespace quansim;

namespace {

MeasurementSet patch_like(int robot, int timestep, int n, double value = 0.5) {
    MeasurementSet out;
    for (int i = 0; i < n; ++i) {
        out.add(Cell{i, 0}, value, ProvenanceToken{robot, timestep});
    }
    return out;
}

Message message_from(int sender, Cell loc, int timestep, int n = 5) {
    return Message{sender, loc, timestep, patch_like(sender, timestep, n)};
}

std::map<int, TeammateBelief> single_belief(int id, Cell start) {
    std::map<int, TeammateBelief> beliefs;
    beliefs.emplace(id, TeammateBelief(id, start));
    return beliefs;
}

}  // namespace

TEST_CASE("sense_teammates freshness, inclusive boundary, staleness") {
    auto beliefs = single_belief(1, Cell{0, 0});
    beliefs.emplace(2, TeammateBelief(2, Cell{1, 1}));
    beliefs.emplace(3, TeammateBelief(3, Cell{2, 2}));

    std::map<int, Cell> positions{{1, Cell{3, 0}}, {2, Cell{5, 0}}, {3, Cell{9, 9}}};
    // radius 5 in cell units; robot 2 sits at exactly distance 5.
    sense_teammates(Cell{0, 0}, positions, 5.0, 1.0, true, beliefs);

    CHECK(beliefs.at(1).location_fresh());
    CHECK(beliefs.at(1).last_known_location() == Cell{3, 0});
    CHECK(beliefs.at(2).location_fresh());  // inclusive boundary
    CHECK(beliefs.at(2).last_known_location() == Cell{5, 0});
    CHECK_FALSE(beliefs.at(3).location_fresh());
    CHECK(beliefs.at(3).last_known_location() == Cell{2, 2});  // initial value retained

    // Meters scaling: same layout, cell size shrinks every distance under r.
    sense_teammates(Cell{0, 0}, positions, 5.0, 0.1, false, beliefs);
    CHECK(beliefs.at(3).location_fresh());
}

TEST_CASE("on_message_received updates location, data, and rejects misrouting") {
    TeammateBelief belief(1, Cell{0, 0});
    const Message msg = message_from(1, Cell{4, 4}, 3);
    on_message_received(belief, msg);
    CHECK(belief.last_known_location() == Cell{4, 4});
    CHECK(belief.location_fresh());
    CHECK(belief.believed_data().size() == 5);

    // Duplicate redelivery is idempotent.
    on_message_received(belief, msg);
    CHECK(belief.believed_data().size() == 5);

    // Two distinct messages union by unique tokens.
    on_message_received(belief, message_from(1, Cell{5, 5}, 4));
    CHECK(belief.believed_data().size() == 10);

    TeammateBelief other(2, Cell{0, 0});
    CHECK_THROWS_AS(on_message_received(other, msg), InvalidArgumentError);
}

TEST_CASE("believed GP tracks the believed data") {
    const GridGeometry grid{10, 10};
    GpHyperparams hp;
    TeammateBelief belief(1, Cell{0, 0});
    const GpPosterior& prior = belief.believed_gp(hp, grid);
    CHECK(prior.training_size() == 0);

    on_message_received(belief, message_from(1, Cell{4, 4}, 1));
    CHECK(belief.believed_gp(hp, grid).training_size() == 5);

    // Cache stays consistent under merges after the first fit.
    belief.merge_believed(patch_like(1, 2, 3));
    CHECK(belief.believed_gp(hp, grid).training_size() == 8);
    const GpPosterior fresh = GpPosterior::fit(belief.believed_data(), hp, grid);
    for (int i = 0; i < grid.cell_count(); ++i) {
        CHECK(belief.believed_gp(hp, grid).mean_grid()[i] ==
              doctest::Approx(fresh.mean_grid()[i]).epsilon(1e-9));
    }
}

TEST_CASE("on_own_broadcast: believed-receipt proxy in default mode") {
    const Message msg = message_from(0, Cell{1, 1}, 2);

    TeammateBelief in_range(1, Cell{2, 2});
    in_range.set_sensed_location(Cell{2, 2});  // fresh: sensed within r this step
    on_own_broadcast(in_range, msg, std::nullopt);
    CHECK(in_range.believed_data().size() == 5);  // believed received regardless of delivery

    TeammateBelief out_of_range(1, Cell{9, 9});
    out_of_range.mark_stale();
    on_own_broadcast(out_of_range, msg, std::nullopt);
    CHECK(out_of_range.believed_data().empty());  // even if delivery actually succeeded
}

TEST_CASE("on_own_broadcast: oracle handshake overrides the proxy") {
    const Message msg = message_from(0, Cell{1, 1}, 2);

    TeammateBelief fresh_but_failed(1, Cell{2, 2});
    fresh_but_failed.set_sensed_location(Cell{2, 2});
    on_own_broadcast(fresh_but_failed, msg, false);
    CHECK(fresh_but_failed.believed_data().empty());

    TeammateBelief stale_but_delivered(1, Cell{9, 9});
    stale_but_delivered.mark_stale();
    on_own_broadcast(stale_but_delivered, msg, true);
    CHECK(stale_but_delivered.believed_data().size() == 5);
}

TEST_CASE("believed data is monotone nondecreasing") {
    TeammateBelief belief(1, Cell{0, 0});
    std::size_t last = 0;
    for (int t = 1; t <= 10; ++t) {
        on_message_received(belief, message_from(1, Cell{t % 5, 0}, t % 3 + 1));
        CHECK(belief.believed_data().size() >= last);
        last = belief.believed_data().size();
    }
}
