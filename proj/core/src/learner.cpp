#include "archipelago/learner.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "archipelago/errors.hpp"
#include "archipelago/vtrace.hpp"

namespace archipelago {

namespace {

Eigen::VectorXd log_softmax_vec(const Eigen::VectorXd& logits) {
    const double max = logits.maxCoeff();
    const Eigen::ArrayXd shifted = logits.array() - max;
    return shifted - std::log(shifted.exp().sum());
}

Eigen::VectorXd image_vector(const Image& image) {
    const std::vector<double> values = image.to_doubles();
    return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                             static_cast<Eigen::Index>(values.size()));
}

void check_segment(const Trajectory& segment, const NetSpec& spec) {
    const std::size_t n = segment.observations.size();
    if (n == 0) throw DataIntegrityError("trajectory segment is empty");
    if (segment.actions.size() != n || segment.rewards.size() != n ||
        segment.behavior_logp.size() != n || segment.last_rewards.size() != n) {
        throw DataIntegrityError("trajectory segment field lengths disagree");
    }
    if (segment.initial_state.h.size() != spec.lstm_width ||
        segment.initial_state.c.size() != spec.lstm_width) {
        throw DataIntegrityError("trajectory recurrent state does not match the network");
    }
    for (const int a : segment.actions) {
        if (a < 0 || a >= spec.num_actions)
            throw DataIntegrityError("trajectory action out of range: " + std::to_string(a));
    }
}

}  // namespace

ActResult act(const Net& net, const Image& observation, double last_reward, LstmState& state,
              CountingRng& rng) {
    const auto [logits, value] = net.evaluate(image_vector(observation), last_reward, state);
    const Eigen::VectorXd logp = log_softmax_vec(logits);
    std::vector<double> probs(static_cast<std::size_t>(logp.size()));
    for (Eigen::Index i = 0; i < logp.size(); ++i)
        probs[static_cast<std::size_t>(i)] = std::exp(logp[i]);
    const int action = categorical(rng, probs);
    return ActResult{action, logp[action], value};
}

struct SpeciesLearner::BatchPass {
    std::vector<std::vector<StepTape>> tapes;        // [segment][step]
    std::vector<std::vector<double>> target_logp;    // log pi(a_t) under current params
    std::vector<std::vector<double>> values;         // V(s_t) under current params
    int total_steps = 0;
};

SpeciesLearner::SpeciesLearner(int species_id, const NetSpec& spec, const LearnerConfig& config,
                               std::uint64_t init_seed)
    : species_id_(species_id), config_(config), net_(spec) {
    if (config.learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
    if (config.discount < 0.0 || config.discount >= 1.0)
        throw ConfigError("discount must lie in [0, 1)");
    if (config.entropy_cost < 0.0) throw ConfigError("entropy_cost must be non-negative");
    if (config.baseline_cost < 0.0) throw ConfigError("baseline_cost must be non-negative");
    if (config.rmsprop_decay <= 0.0 || config.rmsprop_decay >= 1.0)
        throw ConfigError("rmsprop_decay must lie in (0, 1)");
    if (config.rmsprop_epsilon <= 0.0) throw ConfigError("rmsprop_epsilon must be positive");
    if (config.batch_size <= 0) throw ConfigError("batch_size must be positive");
    if (config.unroll_length <= 0) throw ConfigError("unroll_length must be positive");
    CountingRng rng(init_seed);
    net_.init_params(rng);
    rms_ = Eigen::VectorXd::Zero(net_.num_params());
}

std::int64_t SpeciesLearner::update_count() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return update_count_;
}

Net SpeciesLearner::actor_snapshot() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return net_;
}

SpeciesLearner::BatchPass SpeciesLearner::forward_batch(
    const Net& net, const std::vector<Trajectory>& batch) const {
    if (batch.empty()) throw ArgumentError("forward pass needs a non-empty batch");
    BatchPass pass;
    pass.tapes.reserve(batch.size());
    pass.target_logp.reserve(batch.size());
    pass.values.reserve(batch.size());
    for (const Trajectory& segment : batch) {
        check_segment(segment, net.spec());
        const std::size_t n = segment.observations.size();
        std::vector<StepTape> tapes;
        std::vector<double> logp_taken(n), values(n);
        tapes.reserve(n);
        LstmState state = segment.initial_state;
        for (std::size_t t = 0; t < n; ++t) {
            StepTape tape = net.forward_step(image_vector(segment.observations[t]),
                                             segment.last_rewards[t], state);
            state = Net::state_of(tape);
            const Eigen::VectorXd logp = log_softmax_vec(tape.logits);
            logp_taken[t] = logp[segment.actions[t]];
            values[t] = tape.value;
            tapes.push_back(std::move(tape));
        }
        pass.total_steps += static_cast<int>(n);
        pass.tapes.push_back(std::move(tapes));
        pass.target_logp.push_back(std::move(logp_taken));
        pass.values.push_back(std::move(values));
    }
    return pass;
}

SegmentTargets SpeciesLearner::targets_from_pass(const std::vector<Trajectory>& batch,
                                                 const BatchPass& pass) const {
    SegmentTargets targets;
    targets.value_targets.reserve(batch.size());
    targets.advantages.reserve(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        VtraceResult result =
            vtrace_targets(batch[i].rewards, pass.values[i], batch[i].bootstrap_value,
                           batch[i].behavior_logp, pass.target_logp[i], config_.discount);
        targets.value_targets.push_back(std::move(result.value_targets));
        targets.advantages.push_back(std::move(result.advantages));
    }
    return targets;
}

namespace {

void check_targets(const SegmentTargets& targets, const std::vector<Trajectory>& batch) {
    if (targets.value_targets.size() != batch.size() || targets.advantages.size() != batch.size())
        throw ArgumentError("fixed targets do not cover the batch");
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (targets.value_targets[i].size() != batch[i].observations.size() ||
            targets.advantages[i].size() != batch[i].observations.size())
            throw ArgumentError("fixed target lengths do not match segment lengths");
    }
}

}  // namespace

SegmentTargets SpeciesLearner::compute_targets(const std::vector<Trajectory>& batch) const {
    std::lock_guard<std::mutex> lock(mutex_);
    return targets_from_pass(batch, forward_batch(net_, batch));
}

LossBreakdown SpeciesLearner::loss(const std::vector<Trajectory>& batch,
                                   const SegmentTargets* fixed_targets,
                                   const LossWeights& weights) const {
    std::lock_guard<std::mutex> lock(mutex_);
    const BatchPass pass = forward_batch(net_, batch);
    const SegmentTargets targets =
        fixed_targets != nullptr ? *fixed_targets : targets_from_pass(batch, pass);
    check_targets(targets, batch);

    LossBreakdown out;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const std::size_t n = batch[i].observations.size();
        for (std::size_t t = 0; t < n; ++t) {
            const StepTape& tape = pass.tapes[i][t];
            const Eigen::VectorXd logp = log_softmax_vec(tape.logits);
            const Eigen::ArrayXd pi = logp.array().exp();
            const double entropy = -(pi * logp.array()).sum();
            out.policy_gradient += -pass.target_logp[i][t] * targets.advantages[i][t];
            const double residual = tape.value - targets.value_targets[i][t];
            out.baseline += config_.baseline_cost * 0.5 * residual * residual;
            out.entropy += config_.entropy_cost * -entropy;
        }
    }
    out.steps = pass.total_steps;
    out.policy_gradient /= pass.total_steps;
    out.baseline /= pass.total_steps;
    out.entropy /= pass.total_steps;
    out.total = weights.policy * out.policy_gradient + weights.value * out.baseline +
                weights.entropy * out.entropy;
    return out;
}

namespace {

/// Backpropagates the per-step head gradients through the whole batch.
/// Targets are constants here: gradients never flow into the corrected
/// value targets or advantages.
Eigen::VectorXd gradient_from_pass(const Net& net, const std::vector<Trajectory>& batch,
                                   const std::vector<std::vector<StepTape>>& tapes,
                                   int total_steps, const SegmentTargets& targets,
                                   const LossWeights& weights, double baseline_cost,
                                   double entropy_cost) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(net.num_params());
    const double scale = 1.0 / total_steps;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const std::size_t n = batch[i].observations.size();
        Eigen::VectorXd dh = Eigen::VectorXd::Zero(net.spec().lstm_width);
        Eigen::VectorXd dc = Eigen::VectorXd::Zero(net.spec().lstm_width);
        for (std::size_t t = n; t-- > 0;) {
            const StepTape& tape = tapes[i][t];
            const Eigen::VectorXd logp = log_softmax_vec(tape.logits);
            const Eigen::ArrayXd pi = logp.array().exp();
            const double entropy = -(pi * logp.array()).sum();

            Eigen::VectorXd dlogits = (weights.policy * targets.advantages[i][t] * pi).matrix();
            dlogits[batch[i].actions[t]] -= weights.policy * targets.advantages[i][t];
            dlogits += (weights.entropy * entropy_cost * pi * (logp.array() + entropy)).matrix();
            dlogits *= scale;

            const double dvalue = weights.value * baseline_cost *
                                  (tape.value - targets.value_targets[i][t]) * scale;
            net.backward_step(tape, dlogits, dvalue, dh, dc, grad);
        }
    }
    return grad;
}

}  // namespace

Eigen::VectorXd SpeciesLearner::gradient(const std::vector<Trajectory>& batch,
                                         const SegmentTargets* fixed_targets,
                                         const LossWeights& weights) const {
    std::lock_guard<std::mutex> lock(mutex_);
    const BatchPass pass = forward_batch(net_, batch);
    const SegmentTargets targets =
        fixed_targets != nullptr ? *fixed_targets : targets_from_pass(batch, pass);
    check_targets(targets, batch);
    return gradient_from_pass(net_, batch, pass.tapes, pass.total_steps, targets, weights,
                              config_.baseline_cost, config_.entropy_cost);
}

void SpeciesLearner::species_update(const std::vector<Trajectory>& batch) {
    for (const Trajectory& segment : batch) {
        if (segment.species_id != species_id_)
            throw DataIntegrityError("update batch mixes species " +
                                     std::to_string(segment.species_id) + " into learner " +
                                     std::to_string(species_id_));
    }
    std::lock_guard<std::mutex> lock(mutex_);
    const BatchPass pass = forward_batch(net_, batch);
    const SegmentTargets targets = targets_from_pass(batch, pass);
    const Eigen::VectorXd grad =
        gradient_from_pass(net_, batch, pass.tapes, pass.total_steps, targets, LossWeights{},
                           config_.baseline_cost, config_.entropy_cost);
    rms_ = config_.rmsprop_decay * rms_ +
           (1.0 - config_.rmsprop_decay) * grad.array().square().matrix();
    net_.params() -= (config_.learning_rate * grad.array() /
                      (rms_.array().sqrt() + config_.rmsprop_epsilon))
                         .matrix();
    ++update_count_;
}

Eigen::VectorXd SpeciesLearner::params_snapshot() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return net_.params();
}

Eigen::VectorXd SpeciesLearner::rms_snapshot() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return rms_;
}

void SpeciesLearner::set_params(const Eigen::VectorXd& params) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (params.size() != net_.num_params())
        throw ArgumentError("parameter vector has the wrong length");
    net_.params() = params;
}

void SpeciesLearner::restore(const Eigen::VectorXd& params, const Eigen::VectorXd& rms,
                             std::int64_t update_count) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (params.size() != net_.num_params() || rms.size() != net_.num_params())
        throw ArgumentError("restored state has the wrong length");
    if (update_count < 0) throw ArgumentError("update_count cannot be negative");
    net_.params() = params;
    rms_ = rms;
    update_count_ = update_count;
}

}  // namespace archipelago
