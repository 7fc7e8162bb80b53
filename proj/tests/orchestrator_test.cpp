#include <cmath>
#include <filesystem>
#include <optional>
#include <vector>

#include <doctest.h>

#include "archipelago/bandit.hpp"
#include "archipelago/clamity.hpp"
#include "archipelago/config.hpp"
#include "archipelago/errors.hpp"
#include "archipelago/games.hpp"
#include "archipelago/metrics.hpp"
#include "archipelago/net.hpp"
#include "archipelago/orchestrator.hpp"
#include "archipelago/rng.hpp"
#include "test_util.hpp"

using namespace archipelago;
using archipelago::testing::TempDir;

namespace {

/// Bandit experiment small enough to run inside a unit test.
ExperimentConfig smoke_config() {
    ExperimentConfig cfg = preset("bandit-smoke");
    cfg.protocol.individuals_per_species = 4;
    cfg.population.individuals_per_species = 4;
    cfg.run.ecological_steps = 5;
    cfg.run.checkpoint_interval = 2;
    cfg.learner.batch_size = 2;
    cfg.learner.unroll_length = 5;
    cfg.run.queue_capacity = 16;
    return cfg;
}

}  // namespace

TEST_CASE("a fresh run writes the full artifact set") {
    TempDir scratch;
    const auto run_dir = scratch / "run";
    ExperimentConfig cfg = smoke_config();
    Experiment experiment(cfg, run_dir);
    experiment.run();

    CHECK(experiment.ecological_step() == 5);
    CHECK(std::filesystem::exists(run_dir / "config.json"));
    CHECK(std::filesystem::exists(run_dir / "manifest.json"));
    // Interval 2 plus the final step.
    CHECK(std::filesystem::exists(run_dir / "checkpoints" / "step_2"));
    CHECK(std::filesystem::exists(run_dir / "checkpoints" / "step_4"));
    CHECK(std::filesystem::exists(run_dir / "checkpoints" / "step_5"));

    const MetricsTable metrics = read_metrics_csv(run_dir / "metrics.csv");
    MetricsSchema schema;
    schema.num_islands = 4;
    schema.num_species = 1;
    const auto columns = schema.columns();
    CHECK(metrics.columns == columns);
    REQUIRE(metrics.rows.size() == 5);
    CHECK(metrics.column("e").front() == 0.0);
    CHECK(metrics.column("e").back() == 4.0);
    // Every island hosts somebody or nobody; populations sum to 4 per row.
    for (const auto& row : metrics.rows) {
        double total = 0.0;
        for (int i = 0; i < 4; ++i)
            total += row[metrics.column_index("pop_i" + std::to_string(i) + "_s0")].value_or(0);
        CHECK(total == 4.0);
    }
    // The echoed config reproduces the experiment byte-for-byte.
    const ExperimentConfig echoed =
        parse_config_string(archipelago::testing::read_text(run_dir / "config.json"));
    CHECK(config_to_json_string(echoed) == config_to_json_string(cfg));

    // The run directory now holds a run; a second fresh ctor must refuse.
    CHECK_THROWS_AS(Experiment(cfg, run_dir), StateError);
}

TEST_CASE("zero ecological steps still yields a valid empty run") {
    TempDir scratch;
    ExperimentConfig cfg = smoke_config();
    cfg.run.ecological_steps = 0;
    Experiment experiment(cfg, scratch / "run");
    experiment.run();
    const MetricsTable metrics = read_metrics_csv(scratch / "run" / "metrics.csv");
    CHECK(metrics.rows.empty());
    CHECK_FALSE(metrics.columns.empty());
    CHECK(std::filesystem::exists(scratch / "run" / "checkpoints" / "step_0"));
}

TEST_CASE("a zero adaptation rate freezes the migration weights") {
    TempDir scratch;
    ExperimentConfig cfg = smoke_config();
    cfg.population.adaptation_rate = 0.0;
    Experiment experiment(cfg, scratch / "run");
    experiment.run();
    for (const SpeciesDistribution& dist : experiment.distributions()) {
        for (const double w : dist.weights) CHECK(w == 0.0);
    }
}

TEST_CASE("run_one_step advances exactly one ecological step") {
    TempDir scratch;
    Experiment experiment(smoke_config(), scratch / "run");
    CHECK(experiment.ecological_step() == 0);
    experiment.run_one_step();
    CHECK(experiment.ecological_step() == 1);
    experiment.run_one_step();
    CHECK(experiment.ecological_step() == 2);
    // The learner consumed batches along the way.
    CHECK(experiment.learner(0).update_count() > 0);
    CHECK_THROWS_AS((void)experiment.learner(1), ArgumentError);
}

TEST_CASE("resume continues where the checkpoint stopped") {
    TempDir scratch;
    const auto run_dir = scratch / "run";
    ExperimentConfig cfg = smoke_config();
    {
        Experiment experiment(cfg, run_dir);
        experiment.run_one_step();
        experiment.run_one_step();
        experiment.write_checkpoint_now();
    }
    Experiment resumed = Experiment::resume(run_dir, std::nullopt);
    CHECK(resumed.ecological_step() == 2);
    resumed.run();
    CHECK(resumed.ecological_step() == 5);
    const MetricsTable metrics = read_metrics_csv(run_dir / "metrics.csv");
    CHECK(metrics.rows.size() == 5);

    // Extension raises the budget on the stored config.
    Experiment extended = Experiment::resume(run_dir, 7);
    CHECK(extended.config().run.ecological_steps == 7);
    extended.run();
    CHECK(extended.ecological_step() == 7);

    CHECK_THROWS_AS((void)Experiment::resume(scratch / "nowhere", std::nullopt), StateError);
}

TEST_CASE("fixed-population mode pins the allocation and the weights") {
    TempDir scratch;
    ExperimentConfig cfg = preset("allelopathy-fixed-paper");
    // Shrink to test scale: 2 islands x 2 agents per species, 2 species.
    std::get<AllelopathyConfig>(cfg.game).map_height = 12;
    std::get<AllelopathyConfig>(cfg.game).map_width = 12;
    std::get<AllelopathyConfig>(cfg.game).episode_length = 6;
    std::get<AllelopathyConfig>(cfg.game).streak_caps = {8.0, 250.0};
    std::get<AllelopathyConfig>(cfg.game).type_frequencies = {0.5, 0.5};
    cfg.protocol.num_islands = 2;
    cfg.protocol.fixed_population_size = 2;
    cfg.protocol.solitary_islands = false;
    cfg.protocol.num_species = 2;
    cfg.protocol.individuals_per_species = 4;
    cfg.population.num_species = 2;
    cfg.population.individuals_per_species = 4;
    cfg.learner_profile = "tiny";
    cfg.learner.batch_size = 2;
    cfg.learner.unroll_length = 3;
    cfg.run.ecological_steps = 2;
    cfg.run.checkpoint_interval = 0;
    cfg.run.queue_capacity = 64;

    Experiment experiment(cfg, scratch / "run");
    experiment.run();
    const MetricsTable metrics = read_metrics_csv(scratch / "run" / "metrics.csv");
    REQUIRE(metrics.rows.size() == 2);
    // Every island holds exactly fixed_population_size of each species.
    for (const auto& row : metrics.rows) {
        for (int i = 0; i < 2; ++i) {
            for (int l = 0; l < 2; ++l) {
                const int index = metrics.column_index(
                    "pop_i" + std::to_string(i) + "_s" + std::to_string(l));
                CHECK(row[index] == 2.0);
            }
        }
    }
    CHECK(metrics.column_index("minswitch_i0") >= 0);
    CHECK(metrics.column_index("min_switching") >= 0);
    for (const SpeciesDistribution& dist : experiment.distributions()) {
        for (const double w : dist.weights) CHECK(w == 0.0);
    }
}

TEST_CASE("single-agent mode reports solitary returns only") {
    TempDir scratch;
    ExperimentConfig cfg = preset("clamity-single-agent");
    std::get<ClamityConfig>(cfg.game).episode_length = 4;
    cfg.protocol.single_agent_replicas = 3;
    cfg.learner_profile = "tiny";
    cfg.learner.batch_size = 2;
    cfg.learner.unroll_length = 2;
    cfg.run.ecological_steps = 2;
    cfg.run.checkpoint_interval = 0;
    cfg.run.queue_capacity = 64;

    Experiment experiment(cfg, scratch / "run");
    experiment.run();
    const MetricsTable metrics = read_metrics_csv(scratch / "run" / "metrics.csv");
    CHECK(metrics.column_index("solitary_s0") >= 0);
    CHECK(metrics.column_index("pop_i0_s0") == -1);
    CHECK(metrics.column_index("collective_i0") == -1);
    CHECK(metrics.column_index("max_collective_return") == -1);
    REQUIRE(metrics.rows.size() == 2);
    for (const auto& value : metrics.column("solitary_s0")) {
        REQUIRE(value.has_value());
        CHECK(std::isfinite(*value));
    }
}

TEST_CASE("solitary evaluation islands fill their metrics column") {
    TempDir scratch;
    ExperimentConfig cfg = smoke_config();
    cfg.protocol.solitary_islands = true;
    Experiment experiment(cfg, scratch / "run");
    experiment.run_one_step();
    const MetricsTable metrics = read_metrics_csv(scratch / "run" / "metrics.csv");
    const auto solitary = metrics.column("solitary_s0");
    REQUIRE(solitary.size() == 1);
    REQUIRE(solitary[0].has_value());
    // Solitary bandit islands carry island_id num_islands+; the preset pays
    // only island 0, so the solitary return is 0.
    CHECK(*solitary[0] == 0.0);
}

TEST_CASE("the parallel scheduler completes with full rows") {
    TempDir scratch;
    ExperimentConfig cfg = smoke_config();
    cfg.run.scheduler = SchedulerKind::parallel;
    cfg.run.parallel_workers = 3;
    cfg.run.ecological_steps = 4;
    Experiment experiment(cfg, scratch / "run");
    experiment.run();
    const MetricsTable metrics = read_metrics_csv(scratch / "run" / "metrics.csv");
    REQUIRE(metrics.rows.size() == 4);
    for (const auto& row : metrics.rows) {
        double total = 0.0;
        for (int i = 0; i < 4; ++i)
            total += row[metrics.column_index("pop_i" + std::to_string(i) + "_s0")].value_or(0);
        CHECK(total == 4.0);
    }
    CHECK(experiment.learner(0).update_count() > 0);
}

TEST_CASE("run_island_episode slices segments with bootstrap handoff") {
    BanditConfig game;
    game.episode_length = 5;
    game.num_actions = 2;
    game.island_rewards = {1.0};
    const auto env = make_environment(GameConfig{game}, 0);

    std::vector<Net> nets;
    nets.emplace_back(NetSpec::profile("tiny", 2));
    CountingRng init(3);
    nets[0].init_params(init);

    const std::vector<AgentSeat> seats = {AgentSeat{0, 0}, AgentSeat{0, 1}};
    const EpisodeOutcome outcome =
        run_island_episode(*env, 0, seats, nets, 17, 18, 2, true);

    REQUIRE(outcome.returns.size() == 2);
    // The bandit pays its island constant on the final step only.
    CHECK(outcome.returns[0] == 1.0);
    CHECK(outcome.returns[1] == 1.0);

    // 5 steps slice into segments of 2, 2, 1 per seat.
    REQUIRE(outcome.segments.size() == 6);
    int length_one = 0;
    for (const Trajectory& segment : outcome.segments) {
        CHECK(segment.species_id == 0);
        CHECK((segment.length() == 2 || segment.length() == 1));
        length_one += segment.length() == 1 ? 1 : 0;
    }
    CHECK(length_one == 2);
    // Terminal segments bootstrap with exactly zero.
    for (const Trajectory& segment : outcome.segments) {
        if (segment.length() == 1) CHECK(segment.bootstrap_value == 0.0);
    }

    REQUIRE(outcome.logged_actions.size() == 5);
    REQUIRE(outcome.logged_rewards.size() == 5);
    REQUIRE(outcome.logged_draws.size() == 5);
    CHECK(outcome.logged_rewards[4][0] == 1.0);
    CHECK(outcome.env_draws == env->rng_draws());
}

TEST_CASE("episode logging writes replayable logs") {
    TempDir scratch;
    ExperimentConfig cfg = smoke_config();
    cfg.run.ecological_steps = 1;
    cfg.run.log_episodes = true;
    Experiment experiment(cfg, scratch / "run");
    experiment.run();
    const auto episodes = scratch / "run" / "episodes" / "step_0";
    REQUIRE(std::filesystem::exists(episodes));
    int found = 0;
    for (const auto& entry : std::filesystem::directory_iterator(episodes)) {
        if (entry.path().extension() == ".log") ++found;
    }
    CHECK(found >= 1);
}
