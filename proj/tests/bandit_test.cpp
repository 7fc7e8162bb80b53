#include <vector>

#include "archipelago/bandit.hpp"
#include "archipelago/games.hpp"
#include "doctest.h"

using namespace archipelago;

TEST_CASE("island reward lands once, on the final step") {
    BanditConfig config;
    config.island_rewards = {2.5, 0.0};
    BanditGame env(config, 0);
    env.reset({{0, 0}, {0, 1}}, 1);
    for (int t = 0; t < 4; ++t) {
        const StepResult r = env.step({0, 1});
        CHECK(r.rewards[0] == 0.0);
        CHECK(r.rewards[1] == 0.0);
    }
    const StepResult last = env.step({1, 0});
    CHECK(last.done);
    CHECK(last.rewards[0] == 2.5);
    CHECK(last.rewards[1] == 2.5);  // island constant, action-independent
}

TEST_CASE("islands beyond the reward list pay nothing") {
    BanditConfig config;
    config.island_rewards = {1.0};
    BanditGame env(config, 3);
    env.reset({{0, 0}}, 1);
    double total = 0.0;
    for (int t = 0; t < 5; ++t) total += env.step({0}).rewards[0];
    CHECK(total == 0.0);
}

TEST_CASE("arm rewards accrue per step on top of the island constant") {
    BanditConfig config;
    config.island_rewards = {10.0};
    config.arm_rewards = {1.0, 0.0};
    BanditGame env(config, 0);
    env.reset({{0, 0}}, 1);
    double total = 0.0;
    for (int t = 0; t < 5; ++t) total += env.step({t % 2}).rewards[0];
    CHECK(total == 3.0 + 10.0);  // arm 0 on steps 0, 2, 4 plus the final bonus
}

TEST_CASE("observation is featureless and carries last reward") {
    BanditConfig config;
    config.island_rewards = {2.0};
    config.episode_length = 1;
    BanditGame env(config, 0);
    env.reset({{0, 0}}, 1);
    CHECK(env.observe(0).last_reward == 0.0);
    CHECK(env.observe(0).pixels.height() == 15);
    (void)env.step({0});
    CHECK(env.observe(0).last_reward == 2.0);
    CHECK_THROWS_AS((void)env.observe(2), ArgumentError);
}

TEST_CASE("bandit consumes no generator draws") {
    BanditConfig config;
    config.island_rewards = {1.0, 0.0};
    BanditGame env(config, 1);
    env.reset({{0, 0}}, 99);
    for (int t = 0; t < 5; ++t) (void)env.step({0});
    CHECK(env.rng_draws() == 0);
}

TEST_CASE("lifecycle errors") {
    BanditConfig config;
    BanditGame env(config, 0);
    CHECK_THROWS_AS((void)env.step({0}), StateError);
    env.reset({{0, 0}}, 1);
    CHECK_THROWS_AS((void)env.step({0, 0}), ArgumentError);
    CHECK_THROWS_AS((void)env.step({5}), ArgumentError);
    for (int t = 0; t < 5; ++t) (void)env.step({0});
    CHECK_THROWS_AS((void)env.step({0}), StateError);
    CHECK_THROWS_AS(BanditGame(config, -1), ConfigError);
    BanditConfig bad;
    bad.arm_rewards = {1.0, 2.0, 3.0};  // three rewards, two actions
    CHECK_THROWS_AS(BanditGame(bad, 0), ConfigError);
}

TEST_CASE("game factory dispatches on the config variant") {
    BanditConfig bandit;
    bandit.island_rewards = {1.0};
    const GameConfig game = bandit;
    CHECK(game_name(game) == std::string("bandit"));
    CHECK(game_num_actions(game) == 2);
    CHECK(game_episode_length(game) == 5);
    auto env = make_environment(game, 0);
    env->reset({{0, 0}}, 1);
    CHECK(env->num_actions() == 2);

    const GameConfig clamity = ClamityConfig{};
    CHECK(game_name(clamity) == std::string("clamity"));
    CHECK(game_num_actions(clamity) == 7);  // six universal codes plus settle
    CHECK(game_episode_length(clamity) == 250);

    const GameConfig allelopathy = AllelopathyConfig{};
    CHECK(game_name(allelopathy) == std::string("allelopathy"));
    CHECK(game_num_actions(allelopathy) == 6);
    CHECK(game_episode_length(allelopathy) == 1000);
}
