#pragma once

#include <vector>

#include "archipelago/image.hpp"
#include "archipelago/net.hpp"

namespace archipelago {

/// One unrolled segment of an agent's episode (at most unroll_length steps;
/// the final segment of an episode may be shorter). Observations are stored
/// raw; the learner rescales them. bootstrap_value is the actor's value
/// estimate one step past the segment (0 at episode end).
struct Trajectory {
    int species_id = 0;
    int island_id = 0;
    std::vector<Image> observations;
    std::vector<double> last_rewards;
    std::vector<int> actions;
    std::vector<double> behavior_logp;
    std::vector<double> rewards;
    LstmState initial_state;
    double bootstrap_value = 0.0;

    [[nodiscard]] int length() const { return static_cast<int>(actions.size()); }
};

}  // namespace archipelago
