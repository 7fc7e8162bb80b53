#pragma once

#include <memory>
#include <variant>

#include "archipelago/allelopathy.hpp"
#include "archipelago/bandit.hpp"
#include "archipelago/clamity.hpp"

namespace archipelago {

using GameConfig = std::variant<ClamityConfig, AllelopathyConfig, BanditConfig>;

[[nodiscard]] const char* game_name(const GameConfig& config);

/// island_id parameterizes island-dependent games (bandit); grid games
/// ignore it.
[[nodiscard]] std::unique_ptr<Environment> make_environment(const GameConfig& config,
                                                            int island_id);

/// Action-set size implied by the config, available before any environment
/// is built (policy heads are sized from it).
[[nodiscard]] int game_num_actions(const GameConfig& config);

[[nodiscard]] int game_episode_length(const GameConfig& config);

}  // namespace archipelago
