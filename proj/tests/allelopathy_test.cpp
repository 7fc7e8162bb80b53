#include <cmath>
#include <numeric>
#include <vector>

#include "archipelago/allelopathy.hpp"
#include "doctest.h"

using namespace archipelago;

namespace {

std::vector<int> idle(int n) { return std::vector<int>(n, action::rotate_left); }

}  // namespace

TEST_CASE("harvest_reward streak bookkeeping") {
    const AllelopathyConfig config;  // caps {250, 250}
    SUBCASE("first harvest pays one") {
        const HarvestOutcome out = harvest_reward(DigestivePayload{}, 1, config);
        CHECK(out.reward == 1.0);
        CHECK(out.payload.last_type == 1);
        CHECK(out.payload.streak == 1);
        CHECK(out.payload.switch_count == 0);
    }
    SUBCASE("streaks ramp 1, 2, 3, ... and cap at 250") {
        DigestivePayload p;
        for (int k = 1; k <= 300; ++k) {
            const HarvestOutcome out = harvest_reward(p, 1, config);
            CHECK(out.reward == static_cast<double>(std::min(k, 250)));
            p = out.payload;
        }
        CHECK(p.streak == 300);
        CHECK(p.switch_count == 0);
    }
    SUBCASE("the biased cap clamps type 0 at 8 from the 8th consecutive harvest") {
        AllelopathyConfig biased;
        biased.streak_caps = {8.0, 250.0};
        DigestivePayload p;
        for (int k = 1; k <= 20; ++k) {
            const HarvestOutcome out = harvest_reward(p, 0, biased);
            CHECK(out.reward == static_cast<double>(std::min(k, 8)));
            p = out.payload;
        }
    }
    SUBCASE("switching resets to one and counts a cost") {
        DigestivePayload p;
        for (int k = 0; k < 5; ++k) p = harvest_reward(p, 0, config).payload;
        const HarvestOutcome out = harvest_reward(p, 1, config);
        CHECK(out.reward == 1.0);
        CHECK(out.payload.streak == 1);
        CHECK(out.payload.last_type == 1);
        CHECK(out.payload.switch_count == 1);
    }
    SUBCASE("unknown type") {
        CHECK_THROWS_AS((void)harvest_reward(DigestivePayload{}, 2, config), ArgumentError);
    }
}

TEST_CASE("random field honors density and type frequencies") {
    AllelopathyConfig config;  // 36x60, density 0.25 -> 540 shrubs
    AllelopathyGame env(config);
    env.reset({}, 42);
    const std::vector<int> census = env.shrub_census();
    CHECK(census.size() == 2);
    CHECK(census[0] + census[1] == 540);
    CHECK(census[0] > 200);  // ~Binomial(540, 0.5), sd ~11.6
    CHECK(census[1] > 200);

    AllelopathyConfig biased = config;
    biased.type_frequencies = {0.8, 0.2};
    AllelopathyGame skewed(biased);
    skewed.reset({}, 42);
    const std::vector<int> skew_census = skewed.shrub_census();
    CHECK(skew_census[0] + skew_census[1] == 540);
    CHECK(skew_census[0] > 380);  // mean 432, sd ~9.3
    CHECK(skew_census[0] < 480);
}

TEST_CASE("census is invariant within an episode") {
    AllelopathyConfig config;
    config.episode_length = 40;
    AllelopathyGame env(config);
    env.reset({{0, 0}, {0, 1}}, 7);
    const std::vector<int> before = env.shrub_census();
    for (int t = 0; t < 40; ++t) (void)env.step({t % 6, (t + 1) % 6});
    CHECK(env.shrub_census() == before);
}

TEST_CASE("fixed layouts are placed verbatim and validated") {
    AllelopathyConfig config;
    config.fixed_shrubs = {{{3, 4}, 0, true}, {{5, 6}, 1, false}};
    config.fixed_spawns = {{{10, 10}, Orientation::north}};
    AllelopathyGame env(config);
    env.reset({{0, 0}}, 1);
    CHECK(env.shrub_state_at(3, 4) == ShrubState::grown);
    CHECK(env.shrub_type_at(3, 4) == 0);
    CHECK(env.shrub_state_at(5, 6) == ShrubState::seed);
    CHECK(env.shrub_type_at(5, 6) == 1);
    CHECK(env.shrub_state_at(0, 0) == ShrubState::none);
    CHECK_THROWS_AS((void)env.shrub_type_at(0, 0), ArgumentError);

    AllelopathyConfig overlap = config;
    overlap.fixed_shrubs.push_back({{3, 4}, 1, true});
    AllelopathyGame bad(overlap);
    CHECK_THROWS_AS(bad.reset({{0, 0}}, 1), ConfigError);
}

TEST_CASE("harvest by contact consumes the shrub and leaves a same-type seed") {
    AllelopathyConfig config;
    config.fixed_shrubs = {{{10, 11}, 1, true}};
    config.fixed_spawns = {{{10, 10}, Orientation::north}};
    config.base_regrowth_probability = 0.0;  // keep the field static
    AllelopathyGame env(config);
    env.reset({{0, 0}}, 1);
    const StepResult result = env.step({action::move_right});
    CHECK(result.rewards[0] == 1.0);
    CHECK(env.agent(0).position == GridCell{10, 11});
    CHECK(env.shrub_state_at(10, 11) == ShrubState::seed);
    CHECK(env.shrub_type_at(10, 11) == 1);
    CHECK(env.payload(0).last_type == 1);
    CHECK(env.payload(0).streak == 1);
    // Standing on a seed earns nothing.
    const StepResult still = env.step(idle(1));
    CHECK(still.rewards[0] == 0.0);
}

TEST_CASE("switch counters surface through the environment interface") {
    AllelopathyConfig config;
    config.fixed_shrubs = {{{10, 11}, 0, true}, {{10, 12}, 1, true}};
    config.fixed_spawns = {{{10, 10}, Orientation::north}};
    config.base_regrowth_probability = 0.0;
    AllelopathyGame env(config);
    env.reset({{0, 0}}, 1);
    (void)env.step({action::move_right});  // harvest type 0
    (void)env.step({action::move_right});  // harvest type 1: one switch
    const auto counts = env.switch_counts();
    REQUIRE(counts.has_value());
    CHECK((*counts)[0] == 1);
    CHECK(env.payload(0).switch_count == 1);
}

TEST_CASE("suppression divides regrowth probability by one plus rival count") {
    AllelopathyConfig config;
    config.fixed_shrubs = {{{5, 5}, 1, false},  // type-B seed
                           {{3, 5}, 0, true},
                           {{7, 5}, 0, true},
                           {{5, 3}, 0, true},
                           {{5, 7}, 0, true}};
    AllelopathyGame env(config);
    env.reset({}, 1);
    CHECK(env.regrowth_probability(5, 5) == 0.05 / 5.0);  // four rivals in radius 2
    // Grown shrubs of the same type do not suppress.
    AllelopathyConfig friendly = config;
    for (std::size_t i = 1; i < friendly.fixed_shrubs.size(); ++i) {
        friendly.fixed_shrubs[i].type = 1;
    }
    AllelopathyGame kin(friendly);
    kin.reset({}, 1);
    CHECK(kin.regrowth_probability(5, 5) == 0.05);
    // Rivals outside the Chebyshev radius do not count.
    AllelopathyConfig far = config;
    far.fixed_shrubs = {{{5, 5}, 1, false}, {{5, 8}, 0, true}};
    AllelopathyGame spread(far);
    spread.reset({}, 1);
    CHECK(spread.regrowth_probability(5, 5) == 0.05);
    // Seeds do not suppress either.
    AllelopathyConfig dormant = config;
    for (std::size_t i = 1; i < dormant.fixed_shrubs.size(); ++i) {
        dormant.fixed_shrubs[i].grown = false;
    }
    AllelopathyGame sleeping(dormant);
    sleeping.reset({}, 1);
    CHECK(sleeping.regrowth_probability(5, 5) == 0.05);
    // Cells holding no shrub at all cannot be asked for a regrowth chance.
    CHECK_THROWS_AS((void)sleeping.regrowth_probability(0, 0), ArgumentError);
}

TEST_CASE("empirical regrowth frequency matches the configured probability") {
    // A lone shrub is harvested the moment it regrows, so every step is an
    // independent regrowth trial: successes / steps estimates p0.
    AllelopathyConfig config;
    config.map_height = 10;
    config.map_width = 10;
    config.episode_length = 2000;
    config.fixed_shrubs = {{{5, 5}, 0, true}};
    config.fixed_spawns = {{{5, 5}, Orientation::north}};
    long grown_after = 0;
    long steps = 0;
    for (int seed = 0; seed < 50; ++seed) {
        AllelopathyGame env(config);
        env.reset({{0, 0}}, 1000 + seed);
        for (int t = 0; t < config.episode_length; ++t) {
            (void)env.step(idle(1));
            ++steps;
            if (env.shrub_state_at(5, 5) == ShrubState::grown) ++grown_after;
        }
    }
    const double p_hat = static_cast<double>(grown_after) / static_cast<double>(steps);
    const double p = config.base_regrowth_probability;  // 0.05
    const double bound = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(steps));
    CHECK(steps >= 100000);
    CHECK(std::abs(p_hat - p) <= bound);
}

TEST_CASE("empirical suppressed regrowth runs at a fifth of the base rate") {
    AllelopathyConfig config;
    config.map_height = 10;
    config.map_width = 10;
    config.episode_length = 2000;
    config.fixed_shrubs = {{{5, 5}, 1, true},
                           {{3, 5}, 0, true},
                           {{7, 5}, 0, true},
                           {{5, 3}, 0, true},
                           {{5, 7}, 0, true}};
    config.fixed_spawns = {{{5, 5}, Orientation::north}};
    long grown_after = 0;
    long steps = 0;
    for (int seed = 0; seed < 50; ++seed) {
        AllelopathyGame env(config);
        env.reset({{0, 0}}, 2000 + seed);
        for (int t = 0; t < config.episode_length; ++t) {
            (void)env.step(idle(1));
            ++steps;
            if (env.shrub_state_at(5, 5) == ShrubState::grown) ++grown_after;
        }
    }
    const double p_hat = static_cast<double>(grown_after) / static_cast<double>(steps);
    const double p = config.base_regrowth_probability / 5.0;  // 0.01
    const double bound = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(steps));
    CHECK(steps >= 100000);
    CHECK(std::abs(p_hat - p) <= bound);
}

TEST_CASE("episodes replay identically from the same seed") {
    AllelopathyConfig config;
    config.episode_length = 60;
    auto run = [&](std::uint64_t seed) {
        AllelopathyGame env(config);
        env.reset({{0, 0}, {1, 0}}, seed);
        double total = 0.0;
        for (int t = 0; t < 60; ++t) {
            const StepResult r = env.step({t % 6, (t + 2) % 6});
            total += r.rewards[0] + r.rewards[1];
        }
        return std::pair{total, env.rng_draws()};
    };
    CHECK(run(9) == run(9));
}
