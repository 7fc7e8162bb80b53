#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "archipelago/image.hpp"

namespace archipelago {

/// Identity of one agent slot within an episode: which species the policy
/// belongs to and which individual of that species is playing.
struct AgentSeat {
    int species_id = 0;
    int individual_label = 0;
};

/// What an agent perceives: a square RGB window plus the reward it received
/// on the previous step (0 right after reset).
struct Observation {
    Image pixels;
    double last_reward = 0.0;
};

struct StepResult {
    std::vector<double> rewards;
    bool done = false;
};

/// Episode-scoped simulation. Implementations are value types: a copy is an
/// independent deep copy of the full state, and all stochasticity flows
/// through the seed given to reset(), so (config, seats, seed, actions)
/// fully determines every successor state.
///
/// An instance must be confined to one worker at a time; it may move between
/// workers across episodes but is never shared mutably.
class Environment {
public:
    virtual ~Environment() = default;

    /// Start a fresh episode. Deterministic in (seats, seed).
    virtual void reset(const std::vector<AgentSeat>& seats, std::uint64_t seed) = 0;

    /// Apply one action per agent. Throws StateError once done() is true and
    /// ArgumentError on a malformed joint action.
    virtual StepResult step(const std::vector<int>& joint_action) = 0;

    /// Egocentric view for one agent slot.
    [[nodiscard]] virtual Observation observe(int agent_slot) const = 0;

    [[nodiscard]] virtual int num_agents() const = 0;
    [[nodiscard]] virtual int num_actions() const = 0;
    [[nodiscard]] virtual int episode_length() const = 0;
    [[nodiscard]] virtual int step_index() const = 0;
    [[nodiscard]] virtual bool done() const = 0;

    /// Number of generator draws consumed so far this episode. Logged per
    /// step so replays can verify they stayed in lockstep.
    [[nodiscard]] virtual std::uint64_t rng_draws() const = 0;

    /// Per-agent switching-cost counters; nullopt for games without the
    /// concept.
    [[nodiscard]] virtual std::optional<std::vector<int>> switch_counts() const {
        return std::nullopt;
    }

    [[nodiscard]] virtual std::unique_ptr<Environment> clone() const = 0;
};

}  // namespace archipelago
