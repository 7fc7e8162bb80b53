#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "archipelago/config.hpp"
#include "archipelago/games.hpp"
#include "archipelago/net.hpp"
#include "archipelago/population.hpp"
#include "archipelago/queue.hpp"
#include "archipelago/rng.hpp"
#include "archipelago/vtrace.hpp"

namespace {

using namespace archipelago;

std::vector<double> random_vector(int n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> out(n);
    for (double& v : out) v = dist(gen);
    return out;
}

void BM_Softmax(benchmark::State& state) {
    const std::vector<double> w = random_vector(static_cast<int>(state.range(0)), 11);
    for (auto _ : state) benchmark::DoNotOptimize(softmax_distribution(w));
}
BENCHMARK(BM_Softmax)->Arg(8)->Arg(60);

void BM_PopulationGradient(benchmark::State& state) {
    const int islands = static_cast<int>(state.range(0));
    const std::vector<double> w = random_vector(islands, 12);
    const std::vector<double> phi = random_vector(islands, 13);
    for (auto _ : state) benchmark::DoNotOptimize(population_gradient(w, phi, 1.5));
}
BENCHMARK(BM_PopulationGradient)->Arg(8)->Arg(60);

void BM_SampleAllocation(benchmark::State& state) {
    PopulationConfig config;
    config.num_species = 1;
    config.individuals_per_species = static_cast<int>(state.range(0));
    SpeciesDistribution dist;
    dist.weights = random_vector(60, 14);
    const std::vector<SpeciesDistribution> dists{dist};
    CountingRng rng(99);
    for (auto _ : state) benchmark::DoNotOptimize(sample_allocation(dists, config, rng));
}
BENCHMARK(BM_SampleAllocation)->Arg(64)->Arg(960);

void step_benchmark(benchmark::State& state, const GameConfig& game, int agents) {
    auto env = make_environment(game, 0);
    std::vector<AgentSeat> seats;
    for (int i = 0; i < agents; ++i) seats.push_back(AgentSeat{0, i});
    std::mt19937_64 gen(7);
    std::uniform_int_distribution<int> action(0, game_num_actions(game) - 1);
    env->reset(seats, 1);
    std::vector<int> joint(agents);
    for (auto _ : state) {
        if (env->done()) env->reset(seats, 1);
        for (int& a : joint) a = action(gen);
        benchmark::DoNotOptimize(env->step(joint));
    }
}

void BM_ClamityStep(benchmark::State& state) {
    step_benchmark(state, preset("clamity-desk").game, static_cast<int>(state.range(0)));
}
BENCHMARK(BM_ClamityStep)->Arg(1)->Arg(16);

void BM_AllelopathyStep(benchmark::State& state) {
    step_benchmark(state, preset("allelopathy-desk").game, static_cast<int>(state.range(0)));
}
BENCHMARK(BM_AllelopathyStep)->Arg(1)->Arg(8);

void BM_NetForward(benchmark::State& state) {
    const NetSpec spec = NetSpec::profile("desk", 8);
    Net net(spec);
    CountingRng rng(3);
    net.init_params(rng);
    Eigen::VectorXd image(spec.input_size * spec.input_size * spec.input_channels);
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int i = 0; i < image.size(); ++i) image[i] = dist(gen);
    LstmState lstm = net.initial_state();
    for (auto _ : state) {
        const StepTape tape = net.forward_step(image, 0.5, lstm);
        benchmark::DoNotOptimize(tape.value);
    }
}
BENCHMARK(BM_NetForward);

void BM_NetForwardBackward(benchmark::State& state) {
    const NetSpec spec = NetSpec::profile("desk", 8);
    Net net(spec);
    CountingRng rng(3);
    net.init_params(rng);
    Eigen::VectorXd image(spec.input_size * spec.input_size * spec.input_channels);
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int i = 0; i < image.size(); ++i) image[i] = dist(gen);
    const LstmState lstm = net.initial_state();
    const Eigen::VectorXd dlogits = Eigen::VectorXd::Constant(spec.num_actions, 0.125);
    Eigen::VectorXd grad(net.num_params());
    Eigen::VectorXd dh(spec.lstm_width);
    Eigen::VectorXd dc(spec.lstm_width);
    for (auto _ : state) {
        const StepTape tape = net.forward_step(image, 0.5, lstm);
        grad.setZero();
        dh.setZero();
        dc.setZero();
        net.backward_step(tape, dlogits, 1.0, dh, dc, grad);
        benchmark::DoNotOptimize(grad);
    }
}
BENCHMARK(BM_NetForwardBackward);

void BM_VtraceTargets(benchmark::State& state) {
    const int len = 20;
    const std::vector<double> rewards = random_vector(len, 21);
    const std::vector<double> values = random_vector(len, 22);
    std::vector<double> behavior = random_vector(len, 23);
    std::vector<double> target = behavior;
    for (double& t : target) t += 0.01;
    for (auto _ : state)
        benchmark::DoNotOptimize(vtrace_targets(rewards, values, 0.3, behavior, target, 0.99));
}
BENCHMARK(BM_VtraceTargets);

void BM_QueueCycle(benchmark::State& state) {
    TrajectoryQueue queue(0, 64);
    Trajectory trajectory;
    trajectory.species_id = 0;
    trajectory.observations.assign(5, Image(15, 15));
    trajectory.last_rewards.assign(5, 0.0);
    trajectory.actions.assign(5, 1);
    trajectory.behavior_logp.assign(5, -1.0);
    trajectory.rewards.assign(5, 0.1);
    std::vector<Trajectory> out;
    for (auto _ : state) {
        queue.enqueue(trajectory);
        benchmark::DoNotOptimize(queue.try_dequeue_batch(1, out));
    }
}
BENCHMARK(BM_QueueCycle);

}  // namespace

BENCHMARK_MAIN();
