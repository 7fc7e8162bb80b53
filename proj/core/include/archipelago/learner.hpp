#pragma once

#include <cstdint>
#include <mutex>
#include <vector>

#include <Eigen/Dense>

#include "archipelago/image.hpp"
#include "archipelago/net.hpp"
#include "archipelago/rng.hpp"
#include "archipelago/trajectory.hpp"

namespace archipelago {

/// Individual-timescale hyperparameters (one learner per species).
struct LearnerConfig {
    double learning_rate = 0.0007;
    double entropy_cost = 0.003;
    double discount = 0.99;
    double baseline_cost = 0.5;
    double rmsprop_decay = 0.99;
    double rmsprop_epsilon = 1e-4;
    int batch_size = 32;
    int unroll_length = 20;
};

/// Multipliers that isolate loss terms for testing; all 1 in training.
struct LossWeights {
    double policy = 1.0;
    double value = 1.0;
    double entropy = 1.0;
};

/// Per-term averages over every step in a batch. total is the quantity
/// whose gradient drives the update:
///   policy * (-log pi(a) * advantage)
///   + value * baseline_cost * 0.5 * (v_target - V)^2
///   + entropy * entropy_cost * (-H(pi)).
struct LossBreakdown {
    double policy_gradient = 0.0;
    double baseline = 0.0;
    double entropy = 0.0;
    double total = 0.0;
    int steps = 0;
};

/// Off-policy corrected targets for a batch, one inner vector per segment.
struct SegmentTargets {
    std::vector<std::vector<double>> value_targets;
    std::vector<std::vector<double>> advantages;
};

/// One acting step's outputs, recorded into the trajectory.
struct ActResult {
    int action = 0;
    double log_prob = 0.0;
    double value = 0.0;
};

/// Samples an action from the policy head's softmax (one categorical draw)
/// and advances the recurrent state in place.
[[nodiscard]] ActResult act(const Net& net, const Image& observation, double last_reward,
                            LstmState& state, CountingRng& rng);

/// Owns one species' parameters, optimizer state and update counter.
/// Actors take parameter snapshots; the update path consumes batches of
/// fixed-length segments. All public methods are safe to call
/// concurrently.
class SpeciesLearner {
public:
    SpeciesLearner(int species_id, const NetSpec& spec, const LearnerConfig& config,
                   std::uint64_t init_seed);

    [[nodiscard]] int species_id() const { return species_id_; }
    [[nodiscard]] const NetSpec& spec() const { return net_.spec(); }
    [[nodiscard]] const LearnerConfig& config() const { return config_; }
    [[nodiscard]] std::int64_t update_count() const;

    /// Deep copy of the current network for acting.
    [[nodiscard]] Net actor_snapshot() const;

    /// Off-policy corrected value targets and advantages under the current
    /// parameters (fresh forward pass per segment).
    [[nodiscard]] SegmentTargets compute_targets(const std::vector<Trajectory>& batch) const;

    /// Mean per-step loss. Pass fixed_targets to treat the corrected
    /// targets as constants (they stop gradients in the update too);
    /// nullptr recomputes them from the current parameters.
    [[nodiscard]] LossBreakdown loss(const std::vector<Trajectory>& batch,
                                     const SegmentTargets* fixed_targets,
                                     const LossWeights& weights) const;

    /// Gradient of loss(...).total in flat parameter order, averaged over
    /// every step in the batch.
    [[nodiscard]] Eigen::VectorXd gradient(const std::vector<Trajectory>& batch,
                                           const SegmentTargets* fixed_targets,
                                           const LossWeights& weights) const;

    /// One RMSProp step on the batch gradient (unit loss weights).
    /// Rejects trajectories from other species.
    void species_update(const std::vector<Trajectory>& batch);

    /// Checkpoint access. restore() swaps in all mutable state at once.
    [[nodiscard]] Eigen::VectorXd params_snapshot() const;
    [[nodiscard]] Eigen::VectorXd rms_snapshot() const;
    void set_params(const Eigen::VectorXd& params);
    void restore(const Eigen::VectorXd& params, const Eigen::VectorXd& rms,
                 std::int64_t update_count);

private:
    struct BatchPass;  // forward tapes + per-step policy stats

    [[nodiscard]] BatchPass forward_batch(const Net& net,
                                          const std::vector<Trajectory>& batch) const;
    [[nodiscard]] SegmentTargets targets_from_pass(const std::vector<Trajectory>& batch,
                                                   const BatchPass& pass) const;

    int species_id_;
    LearnerConfig config_;

    mutable std::mutex mutex_;
    Net net_;
    Eigen::VectorXd rms_;
    std::int64_t update_count_ = 0;
};

}  // namespace archipelago
