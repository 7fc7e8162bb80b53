#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "archipelago/env.hpp"
#include "archipelago/rng.hpp"

namespace archipelago {

/// Hand-written controllers used as measurement instruments in tests and
/// oracle experiments. Unlike learning agents they read privileged
/// environment state directly.
class ScriptedController {
public:
    virtual ~ScriptedController() = default;

    /// Chooses slot's next action given full knowledge of the world.
    [[nodiscard]] virtual int select_action(const Environment& env, int slot,
                                            CountingRng& rng) = 0;
};

/// Rotates in place until the given behavior step, settles exactly once,
/// and keeps rotating afterwards. Clamity only.
class SettleAtStep final : public ScriptedController {
public:
    explicit SettleAtStep(int settle_step) : settle_step_(settle_step) {}
    [[nodiscard]] int select_action(const Environment& env, int slot, CountingRng& rng) override;

private:
    int settle_step_;
};

/// Walks greedily (Manhattan) to the nearest nutrient cell, stepping
/// around claimed cells, and settles on arrival. Clamity only.
class SeekNutrientAndSettle final : public ScriptedController {
public:
    [[nodiscard]] int select_action(const Environment& env, int slot, CountingRng& rng) override;
};

/// Walks greedily to the nearest grown shrub of one fixed type, letting
/// contact harvest it; idles while none exists. Allelopathy only.
class ShrubSpecialist final : public ScriptedController {
public:
    explicit ShrubSpecialist(int shrub_type) : shrub_type_(shrub_type) {}
    [[nodiscard]] int select_action(const Environment& env, int slot, CountingRng& rng) override;

private:
    int shrub_type_;
};

/// Uniform over the environment's whole action set.
class UniformRandomController final : public ScriptedController {
public:
    [[nodiscard]] int select_action(const Environment& env, int slot, CountingRng& rng) override;
};

struct ScriptedEpisodeResult {
    std::vector<double> returns;      // cumulative reward per slot
    std::vector<int> switch_counts;   // empty when the game tracks none
    std::uint64_t env_draws = 0;
};

/// Runs one episode to completion, one controller per seat.
[[nodiscard]] ScriptedEpisodeResult run_scripted_episode(
    Environment& env, std::span<const AgentSeat> seats,
    std::span<ScriptedController* const> controllers, std::uint64_t env_seed,
    std::uint64_t action_seed);

}  // namespace archipelago
