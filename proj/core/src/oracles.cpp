#include "archipelago/oracles.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>
#include <vector>

#include "archipelago/allelopathy.hpp"
#include "archipelago/clamity.hpp"
#include "archipelago/config.hpp"
#include "archipelago/errors.hpp"
#include "archipelago/learner.hpp"
#include "archipelago/metrics.hpp"
#include "archipelago/orchestrator.hpp"
#include "archipelago/population.hpp"
#include "archipelago/queue.hpp"
#include "archipelago/rng.hpp"
#include "archipelago/scripted.hpp"
#include "archipelago/vtrace.hpp"

namespace archipelago {
namespace {

constexpr std::uint64_t kOracleSeed = 0x4f5241434c453031ull;  // "ORACLE01"

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    const auto now = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(now - start).count();
}

std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StateError("oracle: cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

bool files_identical(const std::filesystem::path& a, const std::filesystem::path& b,
                     std::string* why) {
    const std::string ba = read_file_bytes(a);
    const std::string bb = read_file_bytes(b);
    if (ba == bb) return true;
    if (why) *why = a.filename().string() + " differs (" + std::to_string(ba.size()) + " vs " +
                    std::to_string(bb.size()) + " bytes)";
    return false;
}

Image random_image(CountingRng& rng) {
    Image img(NetSpec::input_size, NetSpec::input_size);
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            img.set(r, c,
                    {static_cast<std::uint8_t>(uniform_index(rng, 256)),
                     static_cast<std::uint8_t>(uniform_index(rng, 256)),
                     static_cast<std::uint8_t>(uniform_index(rng, 256))});
        }
    }
    return img;
}

}  // namespace

OracleResult population_gradient_oracle() {
    const auto start = std::chrono::steady_clock::now();
    CountingRng rng(derive_seed(kOracleSeed, 101, 0));
    const double etas[] = {0.1, 0.3, 1.5};
    const double h = 1e-5;
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + uniform_index(rng, 7);
        std::vector<double> w(n), phi(n);
        for (double& x : w) x = uniform_double(rng) * 4.0 - 2.0;
        for (double& x : phi) x = uniform_double(rng) * 4.0 - 1.0;
        const double eta = etas[trial % 3];
        // Independent objective: J(w) = sum_i p_i * (phi_i - eta * log p_i).
        const auto objective = [&](const std::vector<double>& weights) {
            const std::vector<double> p = softmax_distribution(weights);
            double j = 0.0;
            for (int i = 0; i < n; ++i) j += p[i] * (phi[i] - eta * std::log(p[i]));
            return j;
        };
        const std::vector<double> g = population_gradient(w, phi, eta);
        for (int j = 0; j < n; ++j) {
            std::vector<double> up = w, down = w;
            up[j] += h;
            down[j] -= h;
            const double fd = (objective(up) - objective(down)) / (2.0 * h);
            const double err = std::abs(g[j] - fd) / std::max(1.0, std::abs(fd));
            worst = std::max(worst, err);
        }
    }
    const double secs = elapsed_seconds(start);
    const bool ok = worst <= 1e-5 && secs < 5.0;
    return {"population-gradient-vs-finite-difference", ok,
            fmt("1000 instances, worst relative error %.3g (tol 1e-5), %.2fs (limit 5s)", worst,
                secs)};
}

OracleResult gibbs_fixed_point_oracle() {
    const auto start = std::chrono::steady_clock::now();
    CountingRng rng(derive_seed(kOracleSeed, 102, 0));
    const double etas[] = {0.1, 0.3, 1.5};
    double worst_tv = 0.0;
    long worst_iters = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + uniform_index(rng, 6);
        std::vector<double> phi(n);
        for (double& x : phi) x = uniform_double(rng) * 2.0 - 1.0;
        const double eta = etas[trial % 3];
        const std::vector<double> target = gibbs_stationary(phi, eta);
        PopulationConfig config;
        config.adaptation_rate = 0.1;
        config.entropy_weight = eta;
        SpeciesDistribution dist;
        dist.weights.assign(n, 0.0);
        double tv = 1.0;
        long iters = 0;
        while (iters < 100000) {
            dist = update_weights(dist, phi, config);
            ++iters;
            if (iters % 100 == 0 || iters == 100000) {
                const std::vector<double> p = dist.probabilities();
                tv = 0.0;
                for (int i = 0; i < n; ++i) tv += 0.5 * std::abs(p[i] - target[i]);
                if (tv <= 1e-3) break;
            }
        }
        worst_tv = std::max(worst_tv, tv);
        worst_iters = std::max(worst_iters, iters);
    }
    const double secs = elapsed_seconds(start);
    const bool ok = worst_tv <= 1e-3 && secs < 10.0;
    return {"gibbs-fixed-point-convergence", ok,
            fmt("20 fitness vectors, worst TV %.3g (tol 1e-3), slowest %.0f iterations, %.2fs "
                "(limit 10s)",
                worst_tv, static_cast<double>(worst_iters), secs)};
}

OracleResult conservation_oracle() {
    CountingRng rng(derive_seed(kOracleSeed, 103, 0));
    for (int trial = 0; trial < 10000; ++trial) {
        const int num_species = 1 + uniform_index(rng, 4);
        const int num_islands = 1 + uniform_index(rng, 6);
        const int per_species = 1 + uniform_index(rng, 32);
        PopulationConfig config;
        config.adaptation_rate = 0.1;
        config.entropy_weight = 0.5;
        config.num_species = num_species;
        config.individuals_per_species = per_species;
        std::vector<SpeciesDistribution> dists(num_species);
        for (int l = 0; l < num_species; ++l) {
            dists[l].species_id = l;
            dists[l].weights.resize(num_islands);
            for (double& w : dists[l].weights) w = uniform_double(rng) * 6.0 - 3.0;
        }
        const Allocation alloc = sample_allocation(dists, config, rng);
        std::vector<std::map<int, double>> per_individual(num_species);
        for (int l = 0; l < num_species; ++l) {
            int total = 0;
            std::vector<char> seen(per_species, 0);
            for (int i = 0; i < num_islands; ++i) {
                total += alloc.counts[l][i];
                if (alloc.counts[l][i] != static_cast<int>(alloc.members[l][i].size())) {
                    return {"allocation-conservation", false,
                            "counts disagree with member lists at trial " + std::to_string(trial)};
                }
                for (const int label : alloc.members[l][i]) {
                    if (label < 0 || label >= per_species || seen[label]) {
                        return {"allocation-conservation", false,
                                "label " + std::to_string(label) + " repeated or out of range"};
                    }
                    seen[label] = 1;
                    per_individual[l][label] = uniform_double(rng) * 2.0 - 1.0;
                }
            }
            if (total != per_species) {
                return {"allocation-conservation", false,
                        "species " + std::to_string(l) + " fielded " + std::to_string(total) +
                            " of " + std::to_string(per_species) + " individuals"};
            }
        }
        const auto cells = aggregate_fitness(per_individual, alloc);
        for (int l = 0; l < num_species; ++l) {
            for (int i = 0; i < num_islands; ++i) {
                if (alloc.counts[l][i] == 0 && cells[l][i] != 0.0) {
                    return {"allocation-conservation", false,
                            "empty cell reported nonzero fitness " + std::to_string(cells[l][i])};
                }
            }
        }
    }
    return {"allocation-conservation", true,
            "10000 fuzzed allocations: per-species totals exact, labels partitioned, empty cells "
            "average to 0.0"};
}

OracleResult vtrace_reduction_oracle() {
    CountingRng rng(derive_seed(kOracleSeed, 104, 0));
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + uniform_index(rng, 20);
        std::vector<double> rewards(n), values(n), logp(n);
        for (double& x : rewards) x = uniform_double(rng) * 2.0 - 1.0;
        for (double& x : values) x = uniform_double(rng) * 2.0 - 1.0;
        for (double& x : logp) x = -0.1 - uniform_double(rng) * 2.0;
        const double bootstrap = uniform_double(rng) * 2.0 - 1.0;
        const double discount = 0.99;
        const VtraceResult result =
            vtrace_targets(rewards, values, bootstrap, logp, logp, discount);
        // On-policy reference: the plain discounted bootstrap return.
        std::vector<double> expected(n);
        double next = bootstrap;
        for (int t = n - 1; t >= 0; --t) {
            expected[t] = rewards[t] + discount * next;
            next = expected[t];
        }
        for (int t = 0; t < n; ++t) {
            worst = std::max(worst, std::abs(result.value_targets[t] - expected[t]));
        }
        // Fully off-policy (ratio exactly 0): targets collapse to the values.
        std::vector<double> far(n);
        for (int t = 0; t < n; ++t) far[t] = logp[t] - 1000.0;
        const VtraceResult zero = vtrace_targets(rewards, values, bootstrap, logp, far, discount);
        for (int t = 0; t < n; ++t) {
            if (zero.value_targets[t] != values[t] || zero.advantages[t] != 0.0) {
                return {"vtrace-reductions", false,
                        "zero-ratio case did not collapse exactly at step " + std::to_string(t)};
            }
        }
    }
    const bool ok = worst <= 1e-9;
    return {"vtrace-reductions", ok,
            fmt("1000 on-policy sequences match discounted bootstrap returns, worst error %.3g "
                "(tol 1e-9); zero-ratio targets collapse exactly",
                worst)};
}

OracleResult learner_gradient_oracle() {
    const NetSpec spec = NetSpec::profile("tiny", 4);
    LearnerConfig config;
    SpeciesLearner learner(0, spec, config, derive_seed(kOracleSeed, 105, 0));
    CountingRng rng(derive_seed(kOracleSeed, 105, 1));

    std::vector<Trajectory> batch;
    for (const int len : {3, 4}) {
        Trajectory t;
        t.species_id = 0;
        t.island_id = static_cast<int>(batch.size());
        t.initial_state.h = Eigen::VectorXd(spec.lstm_width);
        t.initial_state.c = Eigen::VectorXd(spec.lstm_width);
        for (int i = 0; i < spec.lstm_width; ++i) {
            t.initial_state.h[i] = 0.2 * (uniform_double(rng) - 0.5);
            t.initial_state.c[i] = 0.2 * (uniform_double(rng) - 0.5);
        }
        for (int s = 0; s < len; ++s) {
            t.observations.push_back(random_image(rng));
            t.last_rewards.push_back(uniform_double(rng) * 2.0 - 1.0);
            t.actions.push_back(uniform_index(rng, spec.num_actions));
            t.behavior_logp.push_back(-0.3 - uniform_double(rng) * 1.7);
            t.rewards.push_back(uniform_double(rng) * 2.0 - 1.0);
        }
        t.bootstrap_value = uniform_double(rng) * 2.0 - 1.0;
        batch.push_back(std::move(t));
    }

    // Freeze the off-policy targets so finite differences probe the same
    // objective the analytic gradient differentiates.
    const SegmentTargets targets = learner.compute_targets(batch);
    const Eigen::VectorXd theta = learner.params_snapshot();

    struct Term {
        const char* name;
        LossWeights weights;
    };
    const Term terms[] = {{"policy", {1.0, 0.0, 0.0}},
                          {"value", {0.0, 1.0, 0.0}},
                          {"entropy", {0.0, 0.0, 1.0}},
                          {"combined", {1.0, 1.0, 1.0}}};
    double worst_rel = 0.0;
    const char* worst_term = "none";
    for (const Term& term : terms) {
        const Eigen::VectorXd grad = learner.gradient(batch, &targets, term.weights);
        for (int j = 0; j < theta.size(); ++j) {
            const double h = 1e-5 * std::max(1.0, std::abs(theta[j]));
            Eigen::VectorXd probe = theta;
            probe[j] = theta[j] + h;
            learner.set_params(probe);
            const double up = learner.loss(batch, &targets, term.weights).total;
            probe[j] = theta[j] - h;
            learner.set_params(probe);
            const double down = learner.loss(batch, &targets, term.weights).total;
            const double fd = (up - down) / (2.0 * h);
            const double diff = std::abs(grad[j] - fd);
            if (diff <= 1e-8) continue;
            const double rel = diff / std::max(1e-12, std::abs(fd));
            if (rel > worst_rel) {
                worst_rel = rel;
                worst_term = term.name;
            }
        }
    }
    learner.set_params(theta);
    const bool ok = worst_rel <= 1e-3;
    return {"learner-gradient-vs-finite-difference", ok,
            fmt("all loss terms over every parameter: worst relative error %.3g (tol 1e-3, "
                "absolute floor 1e-8) in the ",
                worst_rel) +
                worst_term + " term"};
}

namespace {

double lone_clam_return(const ClamityConfig& config, ScriptedController& controller,
                        std::uint64_t salt) {
    ClamityGame env(config);
    const std::vector<AgentSeat> seats = {{0, 0}};
    ScriptedController* controllers[] = {&controller};
    const ScriptedEpisodeResult result =
        run_scripted_episode(env, seats, controllers, derive_seed(kOracleSeed, 106, salt),
                             derive_seed(kOracleSeed, 107, salt));
    return result.returns[0];
}

}  // namespace

OracleResult clamity_ordering_oracle() {
    const auto start = std::chrono::steady_clock::now();
    ClamityConfig bare;
    bare.num_nutrient_patches = 0;
    const int settle_steps[] = {0, 5, 10, 50};
    double previous = std::numeric_limits<double>::infinity();
    double worst_gap = 0.0;
    for (const int t : settle_steps) {
        SettleAtStep controller(t);
        const double simulated = lone_clam_return(bare, controller, static_cast<std::uint64_t>(t));
        const double analytic = analytic_settle_return(t, bare);
        worst_gap = std::max(worst_gap, std::abs(simulated - analytic));
        if (worst_gap > 1e-9) {
            return {"clamity-settling-order", false,
                    fmt("simulated settle-at-%g return %.6f disagrees with closed form %.6f",
                        static_cast<double>(t), simulated, analytic)};
        }
        if (!(simulated < previous)) {
            return {"clamity-settling-order", false,
                    fmt("settle-at-%g return %.6f did not drop below the earlier settler's %.6f",
                        static_cast<double>(t), simulated, previous)};
        }
        previous = simulated;
    }
    ClamityConfig fed;
    SeekNutrientAndSettle seeker;
    SettleAtStep immediate(0);
    const double seek_return = lone_clam_return(fed, seeker, 900);
    const double settle_return = lone_clam_return(fed, immediate, 901);
    const double secs = elapsed_seconds(start);
    const bool ordered = seek_return >= 1.2 * settle_return;
    const bool ok = ordered && secs < 30.0;
    return {"clamity-settling-order", ok,
            fmt("later settling earns strictly less (closed-form gap %.3g); nutrient seeker %.2f "
                "vs immediate settler %.2f (needs +20%%)",
                worst_gap, seek_return, settle_return) +
                fmt(", %.2fs (limit 30s)", secs)};
}

OracleResult clamity_crowding_oracle() {
    ClamityConfig crowded;  // default spawn square holds exactly 16 cells
    ClamityConfig dispersed;
    for (const int row : {13, 16, 19, 22}) {
        for (const int col : {25, 28, 31, 34}) {
            dispersed.fixed_spawns.push_back({{row, col}, Orientation::north});
        }
    }
    std::vector<AgentSeat> seats;
    for (int k = 0; k < 16; ++k) seats.push_back({0, k});
    SettleAtStep settle(0);
    std::vector<ScriptedController*> controllers(16, &settle);

    double crowded_mean = 0.0;
    double dispersed_mean = 0.0;
    for (int seed = 0; seed < 20; ++seed) {
        for (const bool spread : {false, true}) {
            const ClamityConfig& config = spread ? dispersed : crowded;
            ClamityGame env(config);
            const ScriptedEpisodeResult result = run_scripted_episode(
                env, seats, controllers, derive_seed(kOracleSeed, 108, seed),
                derive_seed(kOracleSeed, 109, seed));
            const double per_capita =
                std::accumulate(result.returns.begin(), result.returns.end(), 0.0) / 16.0;
            (spread ? dispersed_mean : crowded_mean) += per_capita / 20.0;
        }
    }
    const bool ok = crowded_mean < 0.5 * dispersed_mean;
    return {"clamity-crowding-penalty", ok,
            fmt("20 seeds: spawn-packed settlers earn %.4f per capita vs %.4f dispersed three "
                "apart (must stay under half)",
                crowded_mean, dispersed_mean)};
}

namespace {

/// Independent streak bookkeeping used to cross-check harvest_reward.
double reference_sequence_total(const std::vector<int>& types, const AllelopathyConfig& config,
                                int* switches_out) {
    int last = -1;
    int streak = 0;
    int switches = 0;
    double total = 0.0;
    for (const int type : types) {
        if (last == -1 || type == last) {
            streak += 1;
        } else {
            streak = 1;
            switches += 1;
        }
        total += std::min(static_cast<double>(streak),
                          static_cast<double>(config.streak_caps[type]));
        last = type;
    }
    if (switches_out) *switches_out = switches;
    return total;
}

double game_sequence_total(const std::vector<int>& types, const AllelopathyConfig& config) {
    DigestivePayload payload;
    double total = 0.0;
    for (const int type : types) {
        const HarvestOutcome outcome = harvest_reward(payload, type, config);
        total += outcome.reward;
        payload = outcome.payload;
    }
    return total;
}

}  // namespace

OracleResult streak_ordering_oracle() {
    AllelopathyConfig unbiased;
    AllelopathyConfig biased;
    biased.streak_caps = {8, 250};
    for (const AllelopathyConfig* config : {&unbiased, &biased}) {
        for (int n = 1; n <= 8; ++n) {
            for (int mask = 0; mask < (1 << n); ++mask) {
                std::vector<int> seq(n);
                int ones = 0;
                for (int b = 0; b < n; ++b) {
                    seq[b] = (mask >> b) & 1;
                    ones += seq[b];
                }
                int switches = 0;
                const double reference = reference_sequence_total(seq, *config, &switches);
                const double actual = game_sequence_total(seq, *config);
                if (actual != reference) {
                    return {"streak-reward-ordering", false,
                            fmt("harvest_reward disagrees with the independent recurrence "
                                "(%.1f vs %.1f) on a length-%g sequence",
                                actual, reference, static_cast<double>(n))};
                }
                std::vector<int> grouped(n);
                std::fill(grouped.begin(), grouped.begin() + (n - ones), 0);
                std::fill(grouped.begin() + (n - ones), grouped.end(), 1);
                const double best = reference_sequence_total(grouped, *config, nullptr);
                if (switches >= 2 && !(actual < best)) {
                    return {"streak-reward-ordering", false,
                            fmt("a %g-switch sequence tied the grouped arrangement (%.1f)",
                                static_cast<double>(switches), actual)};
                }
                if (switches <= 1 && actual != best) {
                    return {"streak-reward-ordering", false,
                            fmt("a grouped sequence (%g switches) missed the optimum: %.1f vs "
                                "%.1f",
                                static_cast<double>(switches), actual, best)};
                }
            }
        }
    }
    // The 8-cap only binds past streak length 8: a 12-harvest single-type run
    // must pay 1..8 then 8 each harvest, and a switch must reset to 1.
    DigestivePayload payload;
    for (int k = 1; k <= 12; ++k) {
        const HarvestOutcome outcome = harvest_reward(payload, 0, biased);
        const double expected = std::min(k, 8);
        if (outcome.reward != expected) {
            return {"streak-reward-ordering", false,
                    fmt("biased cap run paid %.1f at harvest %g (expected %.1f)", outcome.reward,
                        static_cast<double>(k), expected)};
        }
        payload = outcome.payload;
    }
    const HarvestOutcome reset = harvest_reward(payload, 1, biased);
    if (reset.reward != 1.0 || reset.payload.streak != 1 || reset.payload.switch_count != 1) {
        return {"streak-reward-ordering", false, "switching after a capped run did not reset to 1"};
    }
    return {"streak-reward-ordering", true,
            "all sequences to length 8 (both cap settings): grouped-by-type is maximal, strictly "
            "above any 2+-switch order; 8-cap clamps a 12-run and a switch resets to 1"};
}

OracleResult mutualism_oracle() {
    AllelopathyConfig config;
    ShrubSpecialist focal(0);
    ShrubSpecialist same(0);
    ShrubSpecialist other(1);
    const std::vector<AgentSeat> seats = {{0, 0}, {1, 0}};
    double with_other = 0.0;
    double with_same = 0.0;
    constexpr int kEpisodes = 100;
    for (int trial = 0; trial < kEpisodes; ++trial) {
        const std::uint64_t env_seed = derive_seed(kOracleSeed, 110, trial);
        const std::uint64_t action_seed = derive_seed(kOracleSeed, 111, trial);
        {
            AllelopathyGame env(config);
            ScriptedController* controllers[] = {&focal, &other};
            with_other +=
                run_scripted_episode(env, seats, controllers, env_seed, action_seed).returns[0] /
                kEpisodes;
        }
        {
            AllelopathyGame env(config);
            ScriptedController* controllers[] = {&focal, &same};
            with_same +=
                run_scripted_episode(env, seats, controllers, env_seed, action_seed).returns[0] /
                kEpisodes;
        }
    }
    const bool ok = with_other > with_same;
    return {"allelopathy-mutualism", ok,
            fmt("100 seed-paired episodes: type-0 specialist earns %.2f beside a type-1 partner "
                "vs %.2f beside a type-0 rival (margin %.2f must be positive)",
                with_other, with_same, with_other - with_same)};
}

OracleResult bandit_archipelago_oracle(const std::filesystem::path& scratch_dir) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentConfig config = preset("bandit-smoke");
    Experiment experiment(config, scratch_dir / "bandit-smoke");
    experiment.run();
    const std::vector<double> probs = experiment.distributions()[0].probabilities();
    const double mass = probs[0];
    const double secs = elapsed_seconds(start);
    const bool ok = mass >= 0.9 && secs < 60.0;
    return {"bandit-archipelago-concentration", ok,
            fmt("after %g ecological steps the species holds %.4f of its mass on the only paying "
                "island (island 0; needs 0.90), %.1fs (limit 60s)",
                static_cast<double>(config.run.ecological_steps), mass, secs)};
}

namespace {

ExperimentConfig determinism_config() {
    ClamityConfig game;
    game.map_height = 12;
    game.map_width = 24;
    game.episode_length = 40;
    game.num_nutrient_patches = 0;
    game.nutrient_min_distance = 4;
    ExperimentConfig config;
    config.name = "determinism-check";
    config.game = game;
    config.protocol.mode = ProtocolMode::malthusian;
    config.protocol.num_islands = 2;
    config.protocol.num_species = 1;
    config.protocol.individuals_per_species = 4;
    config.protocol.solitary_islands = true;
    config.population.adaptation_rate = 0.01;
    config.population.entropy_weight = 1.5;
    config.population.num_species = 1;
    config.population.individuals_per_species = 4;
    config.learner_profile = "tiny";
    config.learner.batch_size = 8;
    config.learner.unroll_length = 10;
    config.run.ecological_steps = 6;
    config.run.master_seed = 11;
    config.run.checkpoint_interval = 3;
    config.run.queue_capacity = 64;
    return config;
}

bool runs_match(const std::filesystem::path& a, const std::filesystem::path& b, long final_step,
                std::string* why) {
    if (!files_identical(a / "metrics.csv", b / "metrics.csv", why)) return false;
    const std::string step_dir = "step_" + std::to_string(final_step);
    for (const char* name : {"species_0.bin", "ecology.bin", "manifest.json"}) {
        if (!files_identical(a / "checkpoints" / step_dir / name,
                             b / "checkpoints" / step_dir / name, why)) {
            return false;
        }
    }
    return true;
}

}  // namespace

OracleResult determinism_oracle(const std::filesystem::path& scratch_dir) {
    const ExperimentConfig config = determinism_config();
    {
        Experiment first(config, scratch_dir / "det-a");
        first.run();
    }
    {
        Experiment second(config, scratch_dir / "det-b");
        second.run();
    }
    std::string why;
    if (!runs_match(scratch_dir / "det-a", scratch_dir / "det-b", config.run.ecological_steps,
                    &why)) {
        return {"run-determinism", false, "two identically seeded runs diverged: " + why};
    }
    ExperimentConfig half = config;
    half.run.ecological_steps = 3;
    {
        Experiment prefix(half, scratch_dir / "det-c");
        prefix.run();
    }
    {
        Experiment resumed = Experiment::resume(scratch_dir / "det-c", config.run.ecological_steps);
        resumed.run();
    }
    if (!runs_match(scratch_dir / "det-a", scratch_dir / "det-c", config.run.ecological_steps,
                    &why)) {
        return {"run-determinism", false,
                "checkpoint-resume diverged from the uninterrupted run: " + why};
    }
    return {"run-determinism", true,
            "re-run and checkpoint-resume both reproduce metrics.csv and the final checkpoint "
            "byte for byte"};
}

namespace {

Trajectory tagged_segment(int species_id, int tag) {
    Trajectory t;
    t.species_id = species_id;
    t.island_id = tag;
    t.observations.emplace_back(1, 1);
    t.last_rewards.push_back(0.0);
    t.actions.push_back(0);
    t.behavior_logp.push_back(-0.1);
    t.rewards.push_back(0.0);
    t.bootstrap_value = 0.0;
    return t;
}

}  // namespace

OracleResult queue_semantics_oracle() {
    {
        TrajectoryQueue queue(0, 4);
        for (int i = 0; i < 6; ++i) queue.enqueue(tagged_segment(0, i));
        const std::vector<Trajectory> kept = queue.snapshot();
        if (kept.size() != 4) {
            return {"trajectory-queue-semantics", false,
                    "overfilled queue held " + std::to_string(kept.size()) + " segments, not 4"};
        }
        for (int i = 0; i < 4; ++i) {
            if (kept[i].island_id != i + 2) {
                return {"trajectory-queue-semantics", false,
                        "overwrite did not drop the oldest segments first"};
            }
        }
    }
    {
        TrajectoryQueue queue(0, 64);
        std::vector<Trajectory> out;
        for (int i = 0; i < 31; ++i) queue.enqueue(tagged_segment(0, i));
        if (queue.try_dequeue_batch(32, out)) {
            return {"trajectory-queue-semantics", false, "a 31-deep queue yielded a 32-batch"};
        }
        queue.enqueue(tagged_segment(0, 31));
        if (!queue.try_dequeue_batch(32, out) || out.size() != 32) {
            return {"trajectory-queue-semantics", false,
                    "a 32-deep queue refused an exact 32-batch"};
        }
        for (int i = 0; i < 32; ++i) {
            if (out[i].island_id != i) {
                return {"trajectory-queue-semantics", false, "batch left FIFO order"};
            }
        }
        if (queue.size() != 0) {
            return {"trajectory-queue-semantics", false, "exact batch left residue behind"};
        }
    }
    {
        // Producer outpaces the consumer 10:1; the ring must bound memory and
        // surviving segments must still come out in arrival order.
        TrajectoryQueue queue(0, 64);
        std::atomic<bool> produced_all{false};
        std::atomic<bool> violated{false};
        std::thread producer([&] {
            for (int i = 0; i < 20000; ++i) {
                queue.enqueue(tagged_segment(0, i));
                if (queue.size() > queue.capacity()) violated.store(true);
            }
            produced_all.store(true);
        });
        int last_tag = -1;
        long batches = 0;
        std::vector<Trajectory> out;
        while (true) {
            if (queue.try_dequeue_batch(32, out)) {
                ++batches;
                for (const Trajectory& t : out) {
                    if (t.island_id <= last_tag) violated.store(true);
                    last_tag = t.island_id;
                }
                std::this_thread::sleep_for(std::chrono::microseconds(200));
            } else if (produced_all.load()) {
                break;
            } else {
                std::this_thread::yield();
            }
        }
        producer.join();
        if (violated.load() || batches == 0) {
            return {"trajectory-queue-semantics", false,
                    "stress run broke the size bound or replayed a segment"};
        }
    }
    return {"trajectory-queue-semantics", true,
            "overwrite-oldest, exact 32-batches, FIFO order and the capacity bound all hold under "
            "a 10:1 producer/consumer stress"};
}

OracleResult desk_exploration_oracle(const std::filesystem::path& scratch_dir, int num_seeds,
                                     long ecological_steps) {
    if (num_seeds <= 0) throw ArgumentError("desk_exploration_oracle: num_seeds must be positive");
    ExperimentConfig config = preset("clamity-desk-explore");
    config.run.ecological_steps = ecological_steps;
    config.run.checkpoint_interval = 0;
    const double threshold = analytic_settle_return(0, std::get<ClamityConfig>(config.game));
    int successes = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < num_seeds; ++s) {
        config.run.master_seed = 100 + static_cast<std::uint64_t>(s);
        Experiment experiment(config, scratch_dir / ("explore-" + std::to_string(s)));
        experiment.run();
        const MetricsTable table = read_metrics_csv(experiment.run_dir() / "metrics.csv");
        const auto smoothed = smooth_nullable(table.column("solitary_s0"), 100);
        double peak = -std::numeric_limits<double>::infinity();
        for (const auto& v : smoothed) {
            if (v.has_value()) peak = std::max(peak, *v);
        }
        best = std::max(best, peak);
        if (peak > threshold) ++successes;
    }
    const int needed = (num_seeds * 3 + 4) / 5;
    const bool ok = successes >= needed;
    return {"desk-exploration", ok,
            fmt("%g of %g seeds pushed the smoothed solitary return past the settle-now baseline "
                "%.4f",
                static_cast<double>(successes), static_cast<double>(num_seeds), threshold) +
                " (need " + std::to_string(needed) + fmt("; best smoothed %.4f)", best)};
}

std::vector<OracleResult> run_fast_oracle_suite() {
    std::vector<OracleResult> results;
    results.push_back(population_gradient_oracle());
    results.push_back(gibbs_fixed_point_oracle());
    results.push_back(conservation_oracle());
    results.push_back(vtrace_reduction_oracle());
    results.push_back(learner_gradient_oracle());
    return results;
}

}  // namespace archipelago
