#include <cmath>
#include <set>
#include <vector>

#include "archipelago/clamity.hpp"
#include "doctest.h"

using namespace archipelago;

namespace {

std::vector<int> idle(int n) { return std::vector<int>(n, action::rotate_left); }

void settle_all(ClamityGame& env) {
    (void)env.step(std::vector<int>(env.num_agents(), action::settle));
}

}  // namespace

TEST_CASE("config validation") {
    SUBCASE("more than four default patches need explicit origins") {
        ClamityConfig config;
        config.num_nutrient_patches = 5;
        CHECK_THROWS_AS(ClamityGame{config}, ConfigError);
    }
    SUBCASE("patch too close to spawn") {
        ClamityConfig config;
        config.nutrient_patch_origins = {{17, 30}};  // on top of the spawn center
        CHECK_THROWS_AS(ClamityGame{config}, ConfigError);
    }
    SUBCASE("patch out of bounds") {
        ClamityConfig config;
        config.nutrient_patch_origins = {{35, 59}};  // 2x2 block spills over the edge
        CHECK_THROWS_AS(ClamityGame{config}, ConfigError);
    }
    SUBCASE("overlapping patches") {
        ClamityConfig config;
        config.nutrient_patch_origins = {{2, 2}, {3, 3}};
        CHECK_THROWS_AS(ClamityGame{config}, ConfigError);
    }
    SUBCASE("nonpositive geometry") {
        ClamityConfig config;
        config.map_height = 0;
        CHECK_THROWS_AS(ClamityGame{config}, ArgumentError);
    }
}

TEST_CASE("default nutrient layout: one 2x2 patch per quadrant, far from spawn") {
    ClamityGame env((ClamityConfig()));
    CHECK(env.nutrient_cells().size() == 16);  // 4 patches * 4 cells
    const GridCell center = env.spawn_center();
    CHECK(center == GridCell{17, 29});
    int quadrant_seen[4] = {0, 0, 0, 0};
    for (const GridCell& cell : env.nutrient_cells()) {
        CHECK(env.nutrient_at(cell.row, cell.col));
        const int dr = std::abs(cell.row - center.row);
        const int dc = std::abs(cell.col - center.col);
        CHECK(std::max(dr, dc) >= 11);  // min Chebyshev distance from spawn
        const int q = (cell.row < center.row ? 0 : 2) + (cell.col < center.col ? 0 : 1);
        ++quadrant_seen[q];
    }
    for (const int count : quadrant_seen) CHECK(count == 4);
}

TEST_CASE("random spawns fill the central square without overlap") {
    ClamityConfig config;  // spawn_region 4 -> 16 cells
    ClamityGame env(config);
    std::vector<AgentSeat> seats;
    for (int k = 0; k < 16; ++k) seats.push_back({0, k});
    env.reset(seats, 123);
    std::set<std::pair<int, int>> cells;
    const GridCell center = env.spawn_center();
    for (int slot = 0; slot < 16; ++slot) {
        const GridCell p = env.agent(slot).position;
        cells.insert({p.row, p.col});
        CHECK(std::abs(p.row - center.row) <= 2);
        CHECK(std::abs(p.col - center.col) <= 2);
    }
    CHECK(cells.size() == 16);

    std::vector<AgentSeat> too_many;
    for (int k = 0; k < 17; ++k) too_many.push_back({0, k});
    ClamityGame small(config);
    CHECK_THROWS_AS(small.reset(too_many, 1), ConfigError);
}

TEST_CASE("settling is irreversible and freezes movement") {
    ClamityConfig config;
    config.num_nutrient_patches = 0;
    config.fixed_spawns = {{{17, 29}, Orientation::north}};
    ClamityGame env(config);
    env.reset({{0, 0}}, 1);
    CHECK(!env.payload(0).settled);
    CHECK_THROWS_AS((void)env.shell_health(0), ArgumentError);
    settle_all(env);
    CHECK(env.payload(0).settled);
    CHECK(env.payload(0).settle_step == 0);
    CHECK(env.shell_owner_at(17, 29) == 0);
    (void)env.step({action::move_right});
    CHECK(env.agent(0).position == GridCell{17, 29});
    (void)env.step({action::settle});  // settling twice is a quiet no-op
    CHECK(env.payload(0).settle_step == 0);
}

TEST_CASE("shell grows concentric rings on the growth period") {
    // Ring arithmetic: sizes (2r+1)^2 = 1, 9, 25 at ages 0, 5, 10.
    ClamityConfig config;
    config.num_nutrient_patches = 0;
    config.fixed_spawns = {{{17, 29}, Orientation::north}};
    ClamityGame env(config);
    env.reset({{0, 0}}, 1);
    settle_all(env);  // step 0
    for (int t = 1; t <= 12; ++t) {
        (void)env.step(idle(1));
        const std::size_t size = env.payload(0).shell_cells.size();
        if (t < 5) CHECK(size == 1);
        if (t >= 5 && t < 10) CHECK(size == 9);
        if (t >= 10) CHECK(size == 25);
    }
    CHECK(env.payload(0).radius == 2);  // capped at max_shell_radius
    for (int t = 13; t <= 16; ++t) (void)env.step(idle(1));
    CHECK(env.payload(0).shell_cells.size() == 25);
}

TEST_CASE("filter reward is rate times shell size for a healthy clam") {
    ClamityConfig config;
    config.num_nutrient_patches = 0;
    config.filter_reward_per_cell_per_step = 0.1;
    config.fixed_spawns = {{{17, 29}, Orientation::north}};
    ClamityGame env(config);
    env.reset({{0, 0}}, 1);
    settle_all(env);
    for (int t = 1; t < 5; ++t) (void)env.step(idle(1));
    // Age 5: the shell just grew to 9 cells, so this step pays 0.9.
    const StepResult result = env.step(idle(1));
    CHECK(result.rewards[0] == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("two clams three apart grow radius-1 shells and both stay healthy") {
    ClamityConfig config;
    config.num_nutrient_patches = 0;
    config.fixed_spawns = {{{17, 25}, Orientation::north}, {{17, 28}, Orientation::north}};
    ClamityGame env(config);
    env.reset({{0, 0}, {0, 1}}, 1);
    settle_all(env);
    for (int t = 1; t <= 5; ++t) (void)env.step(idle(2));
    CHECK(env.payload(0).radius == 1);
    CHECK(env.payload(1).radius == 1);
    CHECK(env.shell_health(0) == ShellHealth::healthy);
    CHECK(env.shell_health(1) == ShellHealth::healthy);
    // The contested middle column was skipped rather than fought over.
    CHECK(env.payload(0).shell_cells.size() + env.payload(1).shell_cells.size() < 18);
    const StepResult result = env.step(idle(2));
    CHECK(result.rewards[0] > 0.0);
    CHECK(result.rewards[1] > 0.0);
}

TEST_CASE("adjacent settlers are unhealthy and filter nothing") {
    ClamityConfig config;
    config.num_nutrient_patches = 0;
    config.fixed_spawns = {{{17, 29}, Orientation::north}, {{17, 30}, Orientation::north}};
    ClamityGame env(config);
    env.reset({{0, 0}, {0, 1}}, 1);
    settle_all(env);
    CHECK(env.shell_health(0) == ShellHealth::unhealthy);
    CHECK(env.shell_health(1) == ShellHealth::unhealthy);
    for (int t = 1; t <= 6; ++t) {
        const StepResult result = env.step(idle(2));
        CHECK(result.rewards[0] == 0.0);
        CHECK(result.rewards[1] == 0.0);
    }
}

TEST_CASE("shells block swimmers") {
    ClamityConfig config;
    config.num_nutrient_patches = 0;
    config.fixed_spawns = {{{17, 29}, Orientation::north}, {{17, 30}, Orientation::north}};
    ClamityGame env(config);
    env.reset({{0, 0}, {0, 1}}, 1);
    (void)env.step({action::settle, action::rotate_left});
    (void)env.step({action::rotate_left, action::move_left});  // into the settled clam's cell
    CHECK(env.agent(1).position == GridCell{17, 30});
    (void)env.step({action::rotate_left, action::move_up});  // free water
    CHECK(env.agent(1).position == GridCell{16, 30});
}

TEST_CASE("engulfed nutrient cells pay the bonus every healthy step") {
    ClamityConfig config;
    config.num_nutrient_patches = 0;
    config.nutrient_patch_origins = {{16, 40}};  // 2x2 patch at rows 16-17, cols 40-41
    config.nutrient_min_distance = 5;
    config.fixed_spawns = {{{17, 39}, Orientation::north}};
    ClamityGame env(config);
    env.reset({{0, 0}}, 1);
    CHECK(env.nutrient_at(16, 40));
    CHECK(env.nutrient_at(17, 41));
    settle_all(env);
    CHECK(env.payload(0).engulfed_nutrient_cells == 0);
    for (int t = 1; t <= 5; ++t) (void)env.step(idle(1));
    // Radius-1 shell spans rows 16-18, cols 38-40: patch column 40 engulfed.
    CHECK(env.payload(0).engulfed_nutrient_cells == 2);
    StepResult result = env.step(idle(1));
    CHECK(result.rewards[0] == doctest::Approx(9 * 0.04 + 6.0).epsilon(1e-12));
    for (int t = 7; t <= 10; ++t) (void)env.step(idle(1));
    // Radius-2 shell engulfs the remaining patch column as well.
    CHECK(env.payload(0).engulfed_nutrient_cells == 4);
    result = env.step(idle(1));
    CHECK(result.rewards[0] == doctest::Approx(25 * 0.04 + 12.0).epsilon(1e-12));
}

TEST_CASE("analytic settle return matches step-by-step simulation bit for bit") {
    ClamityConfig config;
    config.num_nutrient_patches = 0;
    config.episode_length = 30;
    config.fixed_spawns = {{{17, 29}, Orientation::north}};
    for (const int settle_at : {0, 3, 7}) {
        ClamityGame env(config);
        env.reset({{0, 0}}, 1);
        double total = 0.0;
        for (int t = 0; t < 30; ++t) {
            const int code = t == settle_at ? action::settle : action::rotate_left;
            total += env.step({code}).rewards[0];
        }
        CHECK(total == analytic_settle_return(settle_at, config));
    }
    CHECK_THROWS_AS((void)analytic_settle_return(-1, config), ArgumentError);
}

TEST_CASE("clamity reports no switching costs") {
    ClamityGame env((ClamityConfig()));
    env.reset({{0, 0}}, 1);
    CHECK(!env.switch_counts().has_value());
}
