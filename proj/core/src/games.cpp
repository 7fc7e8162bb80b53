#include "archipelago/games.hpp"

namespace archipelago {

namespace {

struct NameVisitor {
    const char* operator()(const ClamityConfig&) const { return "clamity"; }
    const char* operator()(const AllelopathyConfig&) const { return "allelopathy"; }
    const char* operator()(const BanditConfig&) const { return "bandit"; }
};

}  // namespace

const char* game_name(const GameConfig& config) { return std::visit(NameVisitor{}, config); }

std::unique_ptr<Environment> make_environment(const GameConfig& config, int island_id) {
    return std::visit(
        [island_id](const auto& cfg) -> std::unique_ptr<Environment> {
            using T = std::decay_t<decltype(cfg)>;
            if constexpr (std::is_same_v<T, BanditConfig>) {
                return std::make_unique<BanditGame>(cfg, island_id);
            } else if constexpr (std::is_same_v<T, ClamityConfig>) {
                return std::make_unique<ClamityGame>(cfg);
            } else {
                return std::make_unique<AllelopathyGame>(cfg);
            }
        },
        config);
}

int game_num_actions(const GameConfig& config) {
    return std::visit(
        [](const auto& cfg) -> int {
            using T = std::decay_t<decltype(cfg)>;
            if constexpr (std::is_same_v<T, BanditConfig>) {
                return cfg.num_actions;
            } else if constexpr (std::is_same_v<T, ClamityConfig>) {
                return action::universal_count + 1;
            } else {
                return action::universal_count;
            }
        },
        config);
}

int game_episode_length(const GameConfig& config) {
    return std::visit([](const auto& cfg) -> int { return cfg.episode_length; }, config);
}

}  // namespace archipelago
