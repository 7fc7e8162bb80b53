#include "archipelago/population.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "archipelago/errors.hpp"

namespace archipelago {

namespace {

void check_finite(std::span<const double> values, const char* what) {
    if (values.empty()) {
        throw ArgumentError(std::string(what) + ": empty vector");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw ArgumentError(std::string(what) + ": non-finite entry");
        }
    }
}

}  // namespace

std::vector<double> softmax_distribution(std::span<const double> weights) {
    check_finite(weights, "softmax_distribution");
    const double peak = *std::max_element(weights.begin(), weights.end());
    std::vector<double> out(weights.size());
    double norm = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        out[i] = std::exp(weights[i] - peak);
        norm += out[i];
    }
    for (double& p : out) p /= norm;
    return out;
}

std::vector<double> log_softmax(std::span<const double> weights) {
    check_finite(weights, "log_softmax");
    const double peak = *std::max_element(weights.begin(), weights.end());
    double norm = 0.0;
    for (double w : weights) norm += std::exp(w - peak);
    const double log_norm = peak + std::log(norm);
    std::vector<double> out(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        out[i] = weights[i] - log_norm;
    }
    return out;
}

std::vector<double> SpeciesDistribution::probabilities() const {
    return softmax_distribution(weights);
}

std::vector<std::vector<double>> aggregate_fitness(
    const std::vector<std::map<int, double>>& per_individual,
    const Allocation& allocation) {
    const int num_species = allocation.num_species();
    const int num_islands = allocation.num_islands();
    if (static_cast<int>(per_individual.size()) != num_species) {
        throw DataIntegrityError("aggregate_fitness: species count mismatch");
    }
    std::vector<std::vector<double>> means(
        num_species, std::vector<double>(num_islands, 0.0));
    for (int l = 0; l < num_species; ++l) {
        for (int i = 0; i < num_islands; ++i) {
            const auto& cell = allocation.members[l][i];
            if (cell.empty()) continue;  // empty cell averages to exactly 0
            double sum = 0.0;
            for (int label : cell) {
                auto it = per_individual[l].find(label);
                if (it == per_individual[l].end()) {
                    throw DataIntegrityError(
                        "aggregate_fitness: individual " + std::to_string(label) +
                        " of species " + std::to_string(l) + " has no fitness entry");
                }
                sum += it->second;
            }
            means[l][i] = sum / static_cast<double>(cell.size());
        }
    }
    return means;
}

std::vector<double> population_gradient(std::span<const double> weights,
                                        std::span<const double> island_fitness,
                                        double entropy_weight) {
    if (weights.size() != island_fitness.size()) {
        throw ArgumentError("population_gradient: weights and fitness lengths differ");
    }
    check_finite(island_fitness, "population_gradient");
    const std::vector<double> log_p = log_softmax(weights);

    // a_i = fitness_i - entropy_weight * log p(i); g_j = p_j * (a_j - <a>_p).
    std::vector<double> advantage(weights.size());
    std::vector<double> probs(weights.size());
    double mean_advantage = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        probs[i] = std::exp(log_p[i]);
        advantage[i] = island_fitness[i] - entropy_weight * log_p[i];
        mean_advantage += probs[i] * advantage[i];
    }
    std::vector<double> grad(weights.size());
    for (std::size_t j = 0; j < weights.size(); ++j) {
        grad[j] = probs[j] * (advantage[j] - mean_advantage);
    }
    return grad;
}

SpeciesDistribution update_weights(const SpeciesDistribution& dist,
                                   std::span<const double> island_fitness,
                                   const PopulationConfig& config) {
    const std::vector<double> grad =
        population_gradient(dist.weights, island_fitness, config.entropy_weight);
    SpeciesDistribution next = dist;
    for (std::size_t i = 0; i < grad.size(); ++i) {
        next.weights[i] += config.adaptation_rate * grad[i];
    }
    return next;
}

std::vector<double> gibbs_stationary(std::span<const double> island_fitness,
                                     double entropy_weight) {
    if (entropy_weight <= 0.0) {
        throw ArgumentError("gibbs_stationary: entropy_weight must be positive");
    }
    std::vector<double> scaled(island_fitness.size());
    for (std::size_t i = 0; i < island_fitness.size(); ++i) {
        scaled[i] = island_fitness[i] / entropy_weight;
    }
    return softmax_distribution(scaled);
}

Allocation sample_allocation(const std::vector<SpeciesDistribution>& distributions,
                             const PopulationConfig& config, CountingRng& rng) {
    if (static_cast<int>(distributions.size()) != config.num_species) {
        throw ArgumentError("sample_allocation: one distribution per species required");
    }
    Allocation alloc;
    alloc.counts.resize(distributions.size());
    alloc.members.resize(distributions.size());
    for (std::size_t l = 0; l < distributions.size(); ++l) {
        const std::vector<double> probs = distributions[l].probabilities();
        const int num_islands = static_cast<int>(probs.size());
        alloc.counts[l].assign(num_islands, 0);
        alloc.members[l].assign(num_islands, {});
        for (int label = 0; label < config.individuals_per_species; ++label) {
            const int island = categorical(rng, probs);
            ++alloc.counts[l][island];
            alloc.members[l][island].push_back(label);
        }
    }
    return alloc;
}

}  // namespace archipelago
