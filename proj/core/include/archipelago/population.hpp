#pragma once

#include <map>
#include <span>
#include <vector>

#include "archipelago/rng.hpp"

namespace archipelago {

/// The set of replicated environments ("islands") species migrate across.
struct ArchipelagoShape {
    int num_islands = 1;  // islands are indexed 0..num_islands-1
};

/// A species' ecological state: one log-weight per island. The induced
/// island distribution is the softmax of the weights.
struct SpeciesDistribution {
    int species_id = 0;
    std::vector<double> weights;

    /// softmax(weights); entries positive, sums to one.
    std::vector<double> probabilities() const;
};

/// Ecological-timescale hyperparameters. Each species fields exactly
/// `individuals_per_species` bodies across the whole archipelago every
/// step, so total compute is constant regardless of where they migrate.
struct PopulationConfig {
    double adaptation_rate = 0.0;   // step size of the weight update
    double entropy_weight = 0.0;    // keeps residual mass on poor islands
    int num_species = 1;
    int individuals_per_species = 1;

    int total_individuals() const { return num_species * individuals_per_species; }
};

/// One ecological step's assignment of individuals to islands.
/// members[l][i] lists the labels (0..M-1) of species l placed on island i;
/// counts is the same information as cell sizes.
struct Allocation {
    std::vector<std::vector<int>> counts;
    std::vector<std::vector<std::vector<int>>> members;

    int num_species() const { return static_cast<int>(counts.size()); }
    int num_islands() const {
        return counts.empty() ? 0 : static_cast<int>(counts.front().size());
    }
};

/// Episode returns for one ecological step: per individual, and averaged
/// per (species, island) cell. Empty cells average to exactly 0.
struct FitnessReport {
    std::vector<std::map<int, double>> per_individual;    // [species] label -> return
    std::vector<std::vector<double>> per_island_species;  // [species][island]
    long ecological_step = 0;
};

/// Numerically stable softmax (max-subtracted). Throws ArgumentError on an
/// empty vector or non-finite entries.
std::vector<double> softmax_distribution(std::span<const double> weights);

/// Stable log-softmax, same preconditions as softmax_distribution.
std::vector<double> log_softmax(std::span<const double> weights);

/// Per-cell mean of individual fitness, exactly 0 for empty cells. Throws
/// DataIntegrityError when an allocated individual has no fitness entry.
std::vector<std::vector<double>> aggregate_fitness(
    const std::vector<std::map<int, double>>& per_individual,
    const Allocation& allocation);

/// Gradient of the entropy-regularized ecological objective
///     J(w) = sum_i p(i) * (fitness_i - entropy_weight * log p(i)),
/// where p = softmax(w). Using the softmax Jacobian this reduces to
///     g_j = p_j * (a_j - <a>_p),  a_i = fitness_i - entropy_weight * log p(i),
/// which always sums to zero (the update lives in the softmax's zero-sum
/// subspace).
std::vector<double> population_gradient(std::span<const double> weights,
                                        std::span<const double> island_fitness,
                                        double entropy_weight);

/// One ascent step on the weights: w' = w + adaptation_rate * gradient.
/// Pure; the input distribution is untouched.
SpeciesDistribution update_weights(const SpeciesDistribution& dist,
                                   std::span<const double> island_fitness,
                                   const PopulationConfig& config);

/// Closed-form fixed point of the dynamics for constant fitness:
/// p*(i) proportional to exp(fitness_i / entropy_weight). Requires
/// entropy_weight > 0.
std::vector<double> gibbs_stationary(std::span<const double> island_fitness,
                                     double entropy_weight);

/// Samples every species' individuals onto islands: M independent
/// categorical draws per species, labels assigned 0..M-1 in draw order.
/// Per-species totals always equal M by construction.
Allocation sample_allocation(const std::vector<SpeciesDistribution>& distributions,
                             const PopulationConfig& config, CountingRng& rng);

}  // namespace archipelago
