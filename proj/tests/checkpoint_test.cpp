#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <doctest.h>

#include "archipelago/checkpoint.hpp"
#include "archipelago/config.hpp"
#include "archipelago/errors.hpp"
#include "archipelago/rng.hpp"
#include "archipelago/trajectory.hpp"
#include "test_util.hpp"

using namespace archipelago;
using archipelago::testing::TempDir;

namespace {

Trajectory sample_segment(int species_id, CountingRng& rng) {
    Trajectory t;
    t.species_id = species_id;
    t.island_id = 3;
    t.initial_state = LstmState{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)};
    t.initial_state.h << 0.5, -0.25;
    for (int s = 0; s < 2; ++s) {
        Image window(4, 4);
        window.set(s, s, Rgb{200, 10, 30});
        t.observations.push_back(window);
        t.last_rewards.push_back(uniform_double(rng));
        t.actions.push_back(static_cast<int>(uniform_index(rng, 5)));
        t.behavior_logp.push_back(-uniform_double(rng));
        t.rewards.push_back(uniform_double(rng) * 4.0 - 2.0);
    }
    t.bootstrap_value = 1.5;
    return t;
}

CheckpointData sample_data() {
    CountingRng rng(77);
    CheckpointData data;
    data.ecological_step = 42;
    data.master_seed = 0xfeedbeefULL;
    data.spec_hash = 0x1234abcdULL;
    for (int l = 0; l < 2; ++l) {
        SpeciesCheckpoint s;
        s.params = Eigen::VectorXd::Zero(5 + l);
        for (int i = 0; i < s.params.size(); ++i) s.params[i] = uniform_double(rng) - 0.5;
        s.rms = s.params.cwiseAbs();
        s.update_count = 100 + l;
        data.species.push_back(std::move(s));
        data.distributions.push_back(SpeciesDistribution{l, {0.1 * l, -1.0, 2.5}});
    }
    data.queue_segments.resize(2);
    data.queue_segments[0].push_back(sample_segment(0, rng));
    data.queue_segments[0].push_back(sample_segment(0, rng));
    data.queue_segments[1].push_back(sample_segment(1, rng));
    return data;
}

void check_equal(const CheckpointData& a, const CheckpointData& b) {
    CHECK(b.ecological_step == a.ecological_step);
    CHECK(b.master_seed == a.master_seed);
    CHECK(b.spec_hash == a.spec_hash);
    REQUIRE(b.species.size() == a.species.size());
    for (std::size_t l = 0; l < a.species.size(); ++l) {
        CHECK(b.species[l].params == a.species[l].params);
        CHECK(b.species[l].rms == a.species[l].rms);
        CHECK(b.species[l].update_count == a.species[l].update_count);
        CHECK(b.distributions[l].species_id == a.distributions[l].species_id);
        CHECK(b.distributions[l].weights == a.distributions[l].weights);
    }
    REQUIRE(b.queue_segments.size() == a.queue_segments.size());
    for (std::size_t l = 0; l < a.queue_segments.size(); ++l) {
        REQUIRE(b.queue_segments[l].size() == a.queue_segments[l].size());
        for (std::size_t k = 0; k < a.queue_segments[l].size(); ++k) {
            const Trajectory& x = a.queue_segments[l][k];
            const Trajectory& y = b.queue_segments[l][k];
            CHECK(y.species_id == x.species_id);
            CHECK(y.island_id == x.island_id);
            REQUIRE(y.observations.size() == x.observations.size());
            for (std::size_t s = 0; s < x.observations.size(); ++s)
                CHECK(y.observations[s] == x.observations[s]);
            CHECK(y.last_rewards == x.last_rewards);
            CHECK(y.actions == x.actions);
            CHECK(y.behavior_logp == x.behavior_logp);
            CHECK(y.rewards == x.rewards);
            CHECK(y.initial_state.h == x.initial_state.h);
            CHECK(y.initial_state.c == x.initial_state.c);
            CHECK(y.bootstrap_value == x.bootstrap_value);
        }
    }
}

}  // namespace

TEST_CASE("checkpoints round-trip bitwise") {
    TempDir dir;
    const CheckpointData data = sample_data();
    const auto step_dir = dir / "step_42";
    write_checkpoint(step_dir, data);
    CHECK(std::filesystem::exists(step_dir / "manifest.json"));
    CHECK(std::filesystem::exists(step_dir / "ecology.bin"));
    CHECK(std::filesystem::exists(step_dir / "species_0.bin"));
    CHECK(std::filesystem::exists(step_dir / "species_1.bin"));

    const CheckpointData back = read_checkpoint(step_dir, data.spec_hash);
    check_equal(data, back);

    // Overwriting in place still reads back cleanly (atomic rewrite).
    write_checkpoint(step_dir, data);
    check_equal(data, read_checkpoint(step_dir, data.spec_hash));
}

TEST_CASE("spec hash mismatches and corruption are caught") {
    TempDir dir;
    const CheckpointData data = sample_data();
    const auto step_dir = dir / "step_42";
    write_checkpoint(step_dir, data);

    CHECK_THROWS_AS((void)read_checkpoint(step_dir, data.spec_hash + 1), DataIntegrityError);
    CHECK_THROWS_AS((void)read_checkpoint(dir / "step_7", data.spec_hash), DataIntegrityError);

    // Truncation must not slip through.
    const auto species_file = step_dir / "species_1.bin";
    const auto original_size = std::filesystem::file_size(species_file);
    std::filesystem::resize_file(species_file, original_size - 9);
    CHECK_THROWS_AS((void)read_checkpoint(step_dir, data.spec_hash), DataIntegrityError);

    // Restore the length but flip one byte in the other species file.
    write_checkpoint(step_dir, data);
    const auto target = step_dir / "species_0.bin";
    {
        std::fstream file(target, std::ios::in | std::ios::out | std::ios::binary);
        file.seekp(12);
        char byte = 0;
        file.seekg(12);
        file.read(&byte, 1);
        byte = static_cast<char>(byte ^ 0x40);
        file.seekp(12);
        file.write(&byte, 1);
    }
    CHECK_THROWS_AS((void)read_checkpoint(step_dir, data.spec_hash), DataIntegrityError);
}

TEST_CASE("latest_checkpoint_step finds the largest step directory") {
    TempDir dir;
    CHECK_FALSE(latest_checkpoint_step(dir.path()).has_value());

    const CheckpointData data = sample_data();
    write_checkpoint(checkpoint_dir(dir.path(), 3), data);
    write_checkpoint(checkpoint_dir(dir.path(), 10), data);
    CHECK(checkpoint_dir(dir.path(), 10) == dir.path() / "checkpoints" / "step_10");

    const std::optional<long> latest = latest_checkpoint_step(dir.path());
    REQUIRE(latest.has_value());
    CHECK(*latest == 10);
}

TEST_CASE("the spec hash tracks shape, not run length") {
    const ExperimentConfig base = preset("bandit-smoke");
    const std::uint64_t h = experiment_spec_hash(base);

    // Extending a run or reseeding it must stay loadable.
    ExperimentConfig longer = base;
    longer.run.ecological_steps += 1000;
    longer.run.master_seed += 17;
    CHECK(experiment_spec_hash(longer) == h);

    // Changing the learner geometry or the archipelago must not.
    ExperimentConfig fatter = base;
    fatter.learner.batch_size += 1;
    CHECK(experiment_spec_hash(fatter) != h);

    ExperimentConfig wider = base;
    wider.protocol.num_islands += 1;
    CHECK(experiment_spec_hash(wider) != h);

    ExperimentConfig other_game = base;
    other_game.game = ClamityConfig{};
    CHECK(experiment_spec_hash(other_game) != h);
}
