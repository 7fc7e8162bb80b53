#include "archipelago/orchestrator.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <numeric>
#include <string>
#include <thread>
#include <utility>

#include "archipelago/episode_log.hpp"
#include "archipelago/errors.hpp"
#include "archipelago/rng.hpp"
#include "archipelago/version.hpp"

namespace archipelago {

EpisodeOutcome run_island_episode(Environment& env, int island_uid,
                                  const std::vector<AgentSeat>& seats,
                                  const std::vector<Net>& species_nets, std::uint64_t env_seed,
                                  std::uint64_t action_seed, int unroll_length, bool keep_log) {
    if (unroll_length < 1) throw ArgumentError("unroll_length must be positive");
    for (const AgentSeat& seat : seats) {
        if (seat.species_id < 0 || seat.species_id >= static_cast<int>(species_nets.size()))
            throw ArgumentError("seat references a species without a network");
    }
    env.reset(seats, env_seed);
    CountingRng action_rng(action_seed);
    const std::size_t num_seats = seats.size();

    struct SlotRecord {
        std::vector<Image> observations;
        std::vector<double> last_rewards;
        std::vector<int> actions;
        std::vector<double> logp;
        std::vector<double> values;
        std::vector<double> rewards;
        std::vector<LstmState> boundary_states;  // recurrent state entering step k*unroll
        LstmState state;
    };
    std::vector<SlotRecord> records(num_seats);
    for (std::size_t slot = 0; slot < num_seats; ++slot)
        records[slot].state = species_nets[seats[slot].species_id].initial_state();

    EpisodeOutcome out;
    out.returns.assign(num_seats, 0.0);
    std::vector<int> joint(num_seats, 0);
    while (!env.done()) {
        const int t = env.step_index();
        for (std::size_t slot = 0; slot < num_seats; ++slot) {
            SlotRecord& rec = records[slot];
            const Net& net = species_nets[seats[slot].species_id];
            Observation obs = env.observe(static_cast<int>(slot));
            if (t % unroll_length == 0) rec.boundary_states.push_back(rec.state);
            const ActResult choice =
                act(net, obs.pixels, obs.last_reward, rec.state, action_rng);
            rec.observations.push_back(std::move(obs.pixels));
            rec.last_rewards.push_back(obs.last_reward);
            rec.actions.push_back(choice.action);
            rec.logp.push_back(choice.log_prob);
            rec.values.push_back(choice.value);
            joint[slot] = choice.action;
        }
        const StepResult step = env.step(joint);
        for (std::size_t slot = 0; slot < num_seats; ++slot) {
            records[slot].rewards.push_back(step.rewards[slot]);
            out.returns[slot] += step.rewards[slot];
        }
        if (keep_log) {
            out.logged_actions.push_back(joint);
            out.logged_rewards.push_back(step.rewards);
            out.logged_draws.push_back(env.rng_draws());
        }
    }

    const int total_steps = env.step_index();
    for (std::size_t slot = 0; slot < num_seats; ++slot) {
        const SlotRecord& rec = records[slot];
        for (int s0 = 0, segment = 0; s0 < total_steps; s0 += unroll_length, ++segment) {
            const int len = std::min(unroll_length, total_steps - s0);
            Trajectory traj;
            traj.species_id = seats[slot].species_id;
            traj.island_id = island_uid;
            traj.observations.assign(rec.observations.begin() + s0,
                                     rec.observations.begin() + s0 + len);
            traj.last_rewards.assign(rec.last_rewards.begin() + s0,
                                     rec.last_rewards.begin() + s0 + len);
            traj.actions.assign(rec.actions.begin() + s0, rec.actions.begin() + s0 + len);
            traj.behavior_logp.assign(rec.logp.begin() + s0, rec.logp.begin() + s0 + len);
            traj.rewards.assign(rec.rewards.begin() + s0, rec.rewards.begin() + s0 + len);
            traj.initial_state = rec.boundary_states[static_cast<std::size_t>(segment)];
            traj.bootstrap_value =
                s0 + len < total_steps ? rec.values[static_cast<std::size_t>(s0 + len)] : 0.0;
            out.segments.push_back(std::move(traj));
        }
    }
    out.switch_counts = env.switch_counts();
    out.env_draws = env.rng_draws();
    return out;
}

Experiment::Experiment(const ExperimentConfig& config, const std::filesystem::path& run_dir)
    : Experiment(config, run_dir, nullptr) {}

Experiment::Experiment(const ExperimentConfig& config, std::filesystem::path run_dir,
                       const CheckpointData* restored)
    : config_(config), run_dir_(std::move(run_dir)) {
    validate_config(config_);
    spec_hash_ = experiment_spec_hash(config_);
    net_spec_ = NetSpec::profile(config_.learner_profile, game_num_actions(config_.game));
    const int num_species = config_.protocol.num_species;

    for (int l = 0; l < num_species; ++l) {
        learners_.push_back(std::make_unique<SpeciesLearner>(
            l, net_spec_, config_.learner,
            derive_seed(config_.run.master_seed, seed_tag::params,
                        static_cast<std::uint64_t>(l))));
        queues_.push_back(std::make_unique<TrajectoryQueue>(
            l, static_cast<std::size_t>(config_.run.queue_capacity)));
        distributions_.push_back(SpeciesDistribution{
            l, std::vector<double>(static_cast<std::size_t>(config_.protocol.num_islands),
                                   0.0)});
    }

    if (restored != nullptr) {
        if (restored->master_seed != config_.run.master_seed)
            throw DataIntegrityError("checkpoint master seed differs from the config");
        if (static_cast<int>(restored->species.size()) != num_species)
            throw DataIntegrityError("checkpoint species count differs from the config");
        e_ = restored->ecological_step;
        for (int l = 0; l < num_species; ++l) {
            learners_[l]->restore(restored->species[l].params, restored->species[l].rms,
                                  restored->species[l].update_count);
            if (static_cast<int>(restored->distributions[l].weights.size()) !=
                config_.protocol.num_islands)
                throw DataIntegrityError("checkpoint weights do not match the island count");
            distributions_[l] = restored->distributions[l];
            for (const Trajectory& segment : restored->queue_segments[l])
                queues_[l]->enqueue(segment);
        }
        metrics_ = std::make_unique<MetricsWriter>(run_dir_ / "metrics.csv", metrics_schema(),
                                                   e_);
    } else {
        if (std::filesystem::exists(run_dir_ / "config.json"))
            throw StateError("run directory " + run_dir_.string() +
                             " already holds an experiment; resume it instead");
        std::filesystem::create_directories(run_dir_);
        {
            std::ofstream out(run_dir_ / "config.json", std::ios::trunc);
            out << config_to_json_string(config_);
            if (!out) throw StateError("cannot write config.json under " + run_dir_.string());
        }
        {
            std::ofstream out(run_dir_ / "manifest.json", std::ios::trunc);
            out << "{\n  \"code_version\": \"" << kVersion << "\",\n  \"experiment\": \""
                << config_.name << "\",\n  \"master_seed\": " << config_.run.master_seed
                << "\n}\n";
            if (!out) throw StateError("cannot write manifest.json under " + run_dir_.string());
        }
        metrics_ = std::make_unique<MetricsWriter>(run_dir_ / "metrics.csv", metrics_schema());
    }
}

Experiment::~Experiment() {
    for (const auto& queue : queues_)
        if (queue) queue->close();
}

Experiment Experiment::resume(const std::filesystem::path& run_dir,
                              std::optional<long> extend_to_steps) {
    ExperimentConfig config = load_config(run_dir / "config.json");
    if (extend_to_steps) {
        if (*extend_to_steps < 0) throw ArgumentError("step budget cannot be negative");
        config.run.ecological_steps = *extend_to_steps;
    }
    const std::optional<long> step = latest_checkpoint_step(run_dir);
    if (!step)
        throw StateError("no checkpoints to resume from under " + run_dir.string());
    const CheckpointData data =
        read_checkpoint(checkpoint_dir(run_dir, *step), experiment_spec_hash(config));
    return Experiment(config, run_dir, &data);
}

const SpeciesLearner& Experiment::learner(int species_id) const {
    if (species_id < 0 || species_id >= static_cast<int>(learners_.size()))
        throw ArgumentError("no species " + std::to_string(species_id));
    return *learners_[species_id];
}

int Experiment::solitary_replicas() const {
    if (!config_.protocol.solitary_islands) return 0;
    return config_.protocol.mode == ProtocolMode::single_agent
               ? config_.protocol.single_agent_replicas
               : 1;
}

MetricsSchema Experiment::metrics_schema() const {
    MetricsSchema schema;
    schema.num_islands = config_.protocol.num_islands;
    schema.num_species = config_.protocol.num_species;
    schema.switching_columns = std::holds_alternative<AllelopathyConfig>(config_.game);
    schema.solitary_columns = config_.protocol.solitary_islands;
    return schema;
}

Allocation Experiment::make_allocation(long step) {
    const ExperimentProtocol& p = config_.protocol;
    if (p.mode == ProtocolMode::single_agent) {
        Allocation allocation;
        allocation.counts.assign(static_cast<std::size_t>(p.num_species), {});
        allocation.members.assign(static_cast<std::size_t>(p.num_species), {});
        return allocation;
    }
    if (p.mode == ProtocolMode::fixed_population) {
        Allocation allocation;
        allocation.counts.assign(
            static_cast<std::size_t>(p.num_species),
            std::vector<int>(static_cast<std::size_t>(p.num_islands),
                             p.fixed_population_size));
        allocation.members.assign(static_cast<std::size_t>(p.num_species), {});
        for (int l = 0; l < p.num_species; ++l) {
            allocation.members[l].resize(static_cast<std::size_t>(p.num_islands));
            for (int i = 0; i < p.num_islands; ++i) {
                std::vector<int>& labels = allocation.members[l][i];
                labels.resize(static_cast<std::size_t>(p.fixed_population_size));
                std::iota(labels.begin(), labels.end(), i * p.fixed_population_size);
            }
        }
        return allocation;
    }
    CountingRng rng(derive_seed(config_.run.master_seed, seed_tag::allocation,
                                static_cast<std::uint64_t>(step)));
    return sample_allocation(distributions_, config_.population, rng);
}

std::vector<Experiment::IslandJob> Experiment::plan_jobs(const Allocation& allocation,
                                                         long step) {
    (void)step;
    const ExperimentProtocol& p = config_.protocol;
    std::vector<IslandJob> jobs;
    for (int i = 0; i < p.num_islands; ++i) {
        IslandJob job;
        job.role = IslandRole{i, i, -1, 0};
        // Slot order is lexicographic (species, label); labels are already
        // ascending within each allocation cell.
        for (int l = 0; l < p.num_species; ++l)
            for (const int label : allocation.members[l][i])
                job.seats.push_back(AgentSeat{l, label});
        job.env = make_environment(config_.game, i);
        jobs.push_back(std::move(job));
    }
    const int replicas = solitary_replicas();
    for (int l = 0; l < p.num_species && replicas > 0; ++l) {
        for (int k = 0; k < replicas; ++k) {
            IslandJob job;
            const int uid = p.num_islands + l * replicas + k;
            job.role = IslandRole{uid, -1, l, k};
            // The solitary body wears label M: it is not one of the M
            // archipelago individuals.
            job.seats.push_back(AgentSeat{l, p.individuals_per_species});
            job.env = make_environment(config_.game, uid);
            jobs.push_back(std::move(job));
        }
    }
    return jobs;
}

void Experiment::execute_job(IslandJob& job, long step) {
    std::vector<Net> nets;
    nets.reserve(learners_.size());
    for (const auto& learner : learners_) nets.push_back(learner->actor_snapshot());
    const std::uint64_t env_seed =
        derive_seed(config_.run.master_seed, seed_tag::environment,
                    static_cast<std::uint64_t>(step), static_cast<std::uint64_t>(job.role.uid));
    const std::uint64_t action_seed =
        derive_seed(config_.run.master_seed, seed_tag::action, static_cast<std::uint64_t>(step),
                    static_cast<std::uint64_t>(job.role.uid));
    job.outcome = run_island_episode(*job.env, job.role.uid, job.seats, nets, env_seed,
                                     action_seed, config_.learner.unroll_length,
                                     config_.run.log_episodes);
    for (Trajectory& segment : job.outcome.segments)
        queues_[segment.species_id]->enqueue(std::move(segment));
    job.outcome.segments.clear();
}

void Experiment::drain_queues() {
    std::vector<Trajectory> batch;
    for (std::size_t l = 0; l < queues_.size(); ++l) {
        while (queues_[l]->try_dequeue_batch(
            static_cast<std::size_t>(config_.learner.batch_size), batch))
            learners_[l]->species_update(batch);
    }
}

void Experiment::write_episode_logs(const std::vector<IslandJob>& jobs, long step) {
    const std::filesystem::path dir =
        run_dir_ / "episodes" / ("step_" + std::to_string(step));
    std::filesystem::create_directories(dir);
    for (const IslandJob& job : jobs) {
        EpisodeLog log;
        log.header.game = config_.game;
        log.header.island_uid = job.role.uid;
        log.header.env_island_id =
            job.role.archipelago_index >= 0 ? job.role.archipelago_index : job.role.uid;
        log.header.ecological_step = step;
        log.header.env_seed =
            derive_seed(config_.run.master_seed, seed_tag::environment,
                        static_cast<std::uint64_t>(step),
                        static_cast<std::uint64_t>(job.role.uid));
        log.header.seats = job.seats;
        log.steps.resize(job.outcome.logged_actions.size());
        for (std::size_t t = 0; t < log.steps.size(); ++t) {
            log.steps[t].actions = job.outcome.logged_actions[t];
            log.steps[t].rewards = job.outcome.logged_rewards[t];
            log.steps[t].env_draws = job.outcome.logged_draws[t];
        }
        write_episode_log(dir / ("island_" + std::to_string(job.role.uid) + ".log"), log);
    }
}

void Experiment::finish_step(const Allocation& allocation, std::vector<IslandJob>& jobs,
                             long step) {
    const int num_species = config_.protocol.num_species;
    const int num_islands = config_.protocol.num_islands;

    FitnessReport fitness;
    fitness.ecological_step = step;
    fitness.per_individual.assign(static_cast<std::size_t>(num_species), {});
    std::vector<std::optional<std::vector<int>>> switch_counts(
        static_cast<std::size_t>(num_islands));
    std::vector<double> solitary_sum(static_cast<std::size_t>(num_species), 0.0);
    std::vector<int> solitary_count(static_cast<std::size_t>(num_species), 0);

    for (const IslandJob& job : jobs) {
        if (job.role.archipelago_index >= 0) {
            for (std::size_t slot = 0; slot < job.seats.size(); ++slot) {
                const AgentSeat& seat = job.seats[slot];
                fitness.per_individual[seat.species_id][seat.individual_label] =
                    job.outcome.returns[slot];
            }
            switch_counts[job.role.archipelago_index] = job.outcome.switch_counts;
        } else {
            solitary_sum[job.role.solitary_species] += job.outcome.returns.at(0);
            solitary_count[job.role.solitary_species] += 1;
        }
    }
    fitness.per_island_species = aggregate_fitness(fitness.per_individual, allocation);

    // Solitary returns deliberately do not enter the island averages: the
    // evaluation islands sit outside the archipelago's index set.
    if (config_.protocol.mode == ProtocolMode::malthusian) {
        for (int l = 0; l < num_species; ++l)
            distributions_[l] = update_weights(distributions_[l],
                                               fitness.per_island_species[l],
                                               config_.population);
    }
    e_ = step + 1;

    MetricsRow row = island_reductions(fitness, allocation, switch_counts);
    row.species_updates.reserve(static_cast<std::size_t>(num_species));
    for (int l = 0; l < num_species; ++l)
        row.species_updates.push_back(learners_[l]->update_count());
    row.solitary_return.assign(static_cast<std::size_t>(num_species), std::nullopt);
    for (int l = 0; l < num_species; ++l) {
        // Replicated solitary islands (single-agent mode) report their mean.
        if (solitary_count[l] > 0)
            row.solitary_return[l] = solitary_sum[l] / solitary_count[l];
    }
    metrics_->append(row);
    metrics_->flush();

    if (config_.run.log_episodes) write_episode_logs(jobs, step);
    if (config_.run.checkpoint_interval > 0 && e_ % config_.run.checkpoint_interval == 0)
        write_checkpoint_now();
}

void Experiment::step_sequential() {
    const long step = e_;
    const Allocation allocation = make_allocation(step);
    std::vector<IslandJob> jobs = plan_jobs(allocation, step);
    for (IslandJob& job : jobs) {
        execute_job(job, step);
        drain_queues();  // sequential mode updates after every island
    }
    finish_step(allocation, jobs, step);
}

void Experiment::run_one_step() {
    if (config_.run.scheduler != SchedulerKind::sequential)
        throw StateError("run_one_step is only defined for the sequential scheduler");
    if (e_ >= config_.run.ecological_steps)
        throw StateError("all ecological steps already executed");
    step_sequential();
}

void Experiment::run() {
    if (config_.run.scheduler == SchedulerKind::parallel) {
        run_parallel();
    } else {
        while (e_ < config_.run.ecological_steps) step_sequential();
    }
    write_checkpoint_now();
    metrics_->flush();
}

void Experiment::run_parallel() {
    const int num_species = config_.protocol.num_species;
    std::vector<std::thread> updaters;
    std::vector<std::exception_ptr> updater_errors(
        static_cast<std::size_t>(num_species), nullptr);
    updaters.reserve(static_cast<std::size_t>(num_species));
    for (int l = 0; l < num_species; ++l) {
        updaters.emplace_back([this, l, &updater_errors] {
            try {
                std::vector<Trajectory> batch;
                while (queues_[l]->dequeue_batch(
                    static_cast<std::size_t>(config_.learner.batch_size), batch))
                    learners_[l]->species_update(batch);
            } catch (...) {
                updater_errors[static_cast<std::size_t>(l)] = std::current_exception();
            }
        });
    }

    std::exception_ptr worker_error = nullptr;
    while (e_ < config_.run.ecological_steps && worker_error == nullptr) {
        const long step = e_;
        const Allocation allocation = make_allocation(step);
        std::vector<IslandJob> jobs = plan_jobs(allocation, step);
        std::atomic<std::size_t> next{0};
        std::mutex error_mutex;
        const int worker_count = std::min<int>(config_.run.parallel_workers,
                                               static_cast<int>(jobs.size()));
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(std::max(worker_count, 0)));
        for (int w = 0; w < worker_count; ++w) {
            workers.emplace_back([this, step, &jobs, &next, &error_mutex, &worker_error] {
                while (true) {
                    const std::size_t index = next.fetch_add(1);
                    if (index >= jobs.size()) break;
                    try {
                        execute_job(jobs[index], step);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (worker_error == nullptr) worker_error = std::current_exception();
                        break;
                    }
                }
            });
        }
        for (std::thread& worker : workers) worker.join();
        if (worker_error == nullptr) finish_step(allocation, jobs, step);
    }

    for (const auto& queue : queues_) queue->close();
    for (std::thread& updater : updaters) updater.join();
    if (worker_error != nullptr) std::rethrow_exception(worker_error);
    for (const std::exception_ptr& error : updater_errors)
        if (error != nullptr) std::rethrow_exception(error);
}

void Experiment::write_checkpoint_now() {
    CheckpointData data;
    data.ecological_step = e_;
    data.master_seed = config_.run.master_seed;
    data.spec_hash = spec_hash_;
    for (const auto& learner : learners_) {
        SpeciesCheckpoint species;
        species.params = learner->params_snapshot();
        species.rms = learner->rms_snapshot();
        species.update_count = learner->update_count();
        data.species.push_back(std::move(species));
    }
    data.distributions = distributions_;
    for (const auto& queue : queues_) data.queue_segments.push_back(queue->snapshot());
    write_checkpoint(checkpoint_dir(run_dir_, e_), data);
}

}  // namespace archipelago
