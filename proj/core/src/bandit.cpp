#include "archipelago/bandit.hpp"

#include <string>

#include "archipelago/errors.hpp"

namespace archipelago {

BanditGame::BanditGame(const BanditConfig& config, int island_id)
    : config_(config), island_id_(island_id) {
    if (config_.episode_length <= 0) {
        throw ConfigError("bandit: episode_length must be positive");
    }
    if (config_.num_actions <= 0) {
        throw ConfigError("bandit: num_actions must be positive");
    }
    if (!config_.arm_rewards.empty() &&
        static_cast<int>(config_.arm_rewards.size()) != config_.num_actions) {
        throw ConfigError("bandit: arm_rewards must list one reward per action");
    }
    if (island_id_ < 0) {
        throw ConfigError("bandit: negative island id");
    }
}

void BanditGame::reset(const std::vector<AgentSeat>& seats, std::uint64_t seed) {
    seats_ = seats;
    rng_ = CountingRng(seed);
    last_rewards_.assign(seats_.size(), 0.0);
    step_index_ = 0;
    started_ = true;
}

StepResult BanditGame::step(const std::vector<int>& joint_action) {
    if (!started_) {
        throw StateError("BanditGame::step: reset() has not been called");
    }
    if (done()) {
        throw StateError("BanditGame::step: episode already finished");
    }
    if (joint_action.size() != seats_.size()) {
        throw ArgumentError("BanditGame::step: expected " + std::to_string(seats_.size()) +
                            " actions, got " + std::to_string(joint_action.size()));
    }
    const bool final_step = step_index_ + 1 == config_.episode_length;
    const double island_reward =
        island_id_ < static_cast<int>(config_.island_rewards.size())
            ? config_.island_rewards[island_id_]
            : 0.0;
    std::vector<double> rewards(seats_.size(), 0.0);
    for (std::size_t i = 0; i < joint_action.size(); ++i) {
        const int code = joint_action[i];
        if (code < 0 || code >= config_.num_actions) {
            throw ArgumentError("BanditGame::step: action code " + std::to_string(code) +
                                " out of range");
        }
        if (!config_.arm_rewards.empty()) rewards[i] += config_.arm_rewards[code];
        if (final_step) rewards[i] += island_reward;
    }
    last_rewards_ = rewards;
    ++step_index_;
    return StepResult{std::move(rewards), done()};
}

Observation BanditGame::observe(int agent_slot) const {
    if (agent_slot < 0 || agent_slot >= num_agents()) {
        throw ArgumentError("BanditGame::observe: invalid slot " + std::to_string(agent_slot));
    }
    Observation obs;
    obs.pixels = Image(window_size, window_size);  // featureless black view
    obs.last_reward = last_rewards_[agent_slot];
    return obs;
}

std::unique_ptr<Environment> BanditGame::clone() const {
    return std::make_unique<BanditGame>(*this);
}

}  // namespace archipelago
