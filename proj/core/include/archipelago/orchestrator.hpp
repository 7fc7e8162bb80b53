#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "archipelago/checkpoint.hpp"
#include "archipelago/config.hpp"
#include "archipelago/env.hpp"
#include "archipelago/learner.hpp"
#include "archipelago/metrics.hpp"
#include "archipelago/net.hpp"
#include "archipelago/population.hpp"
#include "archipelago/queue.hpp"

namespace archipelago {

/// Where an episode runs. Archipelago islands have archipelago_index >= 0;
/// solitary evaluation islands carry the species they evaluate and (in
/// single-agent mode) a replica ordinal. uid is the stable index used to
/// derive that island's random streams.
struct IslandRole {
    int uid = 0;
    int archipelago_index = -1;
    int solitary_species = -1;
    int replica = 0;
};

/// Everything one island episode produced.
struct EpisodeOutcome {
    std::vector<double> returns;  // per seat
    std::optional<std::vector<int>> switch_counts;
    std::vector<Trajectory> segments;
    std::vector<std::vector<int>> logged_actions;     // per step, when logging
    std::vector<std::vector<double>> logged_rewards;  // per step, when logging
    std::vector<std::uint64_t> logged_draws;          // per step, when logging
    std::uint64_t env_draws = 0;
};

/// Plays one full episode. Every seat acts through its species' frozen
/// network snapshot; all seats share one action stream (drawn in slot
/// order). Trajectories are sliced into unroll-length segments whose
/// bootstrap value is the next segment's first value estimate (0 at the
/// terminal step), and recurrent states are snapshotted at slice
/// boundaries. keep_log records per-step actions/rewards/draws.
[[nodiscard]] EpisodeOutcome run_island_episode(Environment& env, int island_uid,
                                                const std::vector<AgentSeat>& seats,
                                                const std::vector<Net>& species_nets,
                                                std::uint64_t env_seed,
                                                std::uint64_t action_seed, int unroll_length,
                                                bool keep_log);

/// The two-timescale engine: each ecological step samples an allocation,
/// plays one episode per island (plus solitary evaluation islands),
/// streams segments into per-species queues whose consumers apply RMSProp
/// updates, aggregates fitness, and moves the migration weights. The
/// sequential scheduler makes every output a pure function of
/// (config, master_seed); the parallel scheduler trades that for worker
/// concurrency.
class Experiment {
public:
    /// Fresh run: creates run_dir (which must not already hold one),
    /// echoes the resolved config and writes the metrics header.
    Experiment(const ExperimentConfig& config, const std::filesystem::path& run_dir);

    /// Continues from the newest checkpoint under run_dir, optionally
    /// raising the total step budget.
    [[nodiscard]] static Experiment resume(const std::filesystem::path& run_dir,
                                           std::optional<long> extend_to_steps);

    ~Experiment();
    Experiment(Experiment&&) = default;

    /// Runs ecological steps up to config.run.ecological_steps, writing
    /// metrics rows and periodic plus final checkpoints.
    void run();

    /// Executes exactly one ecological step (test hook; sequential only).
    void run_one_step();

    [[nodiscard]] long ecological_step() const { return e_; }
    [[nodiscard]] const ExperimentConfig& config() const { return config_; }
    [[nodiscard]] const std::filesystem::path& run_dir() const { return run_dir_; }
    [[nodiscard]] const std::vector<SpeciesDistribution>& distributions() const {
        return distributions_;
    }
    [[nodiscard]] const SpeciesLearner& learner(int species_id) const;
    [[nodiscard]] int num_islands() const { return config_.protocol.num_islands; }
    [[nodiscard]] int solitary_replicas() const;

    void write_checkpoint_now();

private:
    Experiment(const ExperimentConfig& config, std::filesystem::path run_dir,
               const CheckpointData* restored);

    struct IslandJob {
        IslandRole role;
        std::vector<AgentSeat> seats;
        std::unique_ptr<Environment> env;
        EpisodeOutcome outcome;
    };

    [[nodiscard]] Allocation make_allocation(long step);
    [[nodiscard]] std::vector<IslandJob> plan_jobs(const Allocation& allocation, long step);
    void execute_job(IslandJob& job, long step);
    void finish_step(const Allocation& allocation, std::vector<IslandJob>& jobs, long step);
    void drain_queues();
    void write_episode_logs(const std::vector<IslandJob>& jobs, long step);
    void step_sequential();
    void run_parallel();
    [[nodiscard]] MetricsSchema metrics_schema() const;

    ExperimentConfig config_;
    std::filesystem::path run_dir_;
    std::uint64_t spec_hash_ = 0;
    NetSpec net_spec_;
    long e_ = 0;

    std::vector<std::unique_ptr<SpeciesLearner>> learners_;
    std::vector<std::unique_ptr<TrajectoryQueue>> queues_;
    std::vector<SpeciesDistribution> distributions_;
    std::unique_ptr<MetricsWriter> metrics_;
};

}  // namespace archipelago
