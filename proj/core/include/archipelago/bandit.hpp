#pragma once

#include <cstdint>
#include <vector>

#include "archipelago/env.hpp"
#include "archipelago/rng.hpp"

namespace archipelago {

/// Minimal non-spatial environment for end-to-end harness tests. Two reward
/// channels, both optional: every agent on island i receives
/// island_rewards[i] on the final step (fitness equals the island constant,
/// whatever the policy does), and arm_rewards[a] per step makes the reward
/// action-dependent for learner tests.
struct BanditConfig {
    int episode_length = 5;
    int num_actions = 2;
    std::vector<double> island_rewards;
    std::vector<double> arm_rewards;
};

class BanditGame final : public Environment {
public:
    static constexpr int window_size = 15;

    BanditGame(const BanditConfig& config, int island_id);

    void reset(const std::vector<AgentSeat>& seats, std::uint64_t seed) override;
    StepResult step(const std::vector<int>& joint_action) override;
    [[nodiscard]] Observation observe(int agent_slot) const override;

    [[nodiscard]] int num_agents() const override { return static_cast<int>(seats_.size()); }
    [[nodiscard]] int num_actions() const override { return config_.num_actions; }
    [[nodiscard]] int episode_length() const override { return config_.episode_length; }
    [[nodiscard]] int step_index() const override { return step_index_; }
    [[nodiscard]] bool done() const override { return step_index_ >= config_.episode_length; }
    [[nodiscard]] std::uint64_t rng_draws() const override { return rng_.draws(); }

    [[nodiscard]] int island_id() const { return island_id_; }
    [[nodiscard]] std::unique_ptr<Environment> clone() const override;

private:
    BanditConfig config_;
    int island_id_;
    int step_index_ = 0;
    bool started_ = false;
    std::vector<AgentSeat> seats_;
    std::vector<double> last_rewards_;
    CountingRng rng_;
};

}  // namespace archipelago
