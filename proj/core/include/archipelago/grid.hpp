#pragma once

#include <cstdint>
#include <vector>

#include "archipelago/env.hpp"
#include "archipelago/image.hpp"
#include "archipelago/rng.hpp"

namespace archipelago {

enum class Orientation : int { north = 0, east = 1, south = 2, west = 3 };

struct GridCell {
    int row = 0;
    int col = 0;

    friend bool operator==(const GridCell&, const GridCell&) = default;
};

struct GridPlacement {
    GridCell cell;
    Orientation orientation = Orientation::north;

    friend bool operator==(const GridPlacement&, const GridPlacement&) = default;
};

/// Action codes shared by every grid game. Moves are absolute (world frame);
/// rotations change only what the agent sees. Games may append codes >= 6.
namespace action {
inline constexpr int move_up = 0;
inline constexpr int move_down = 1;
inline constexpr int move_left = 2;
inline constexpr int move_right = 3;
inline constexpr int rotate_left = 4;
inline constexpr int rotate_right = 5;
inline constexpr int universal_count = 6;
}  // namespace action

struct AgentBody {
    int agent_slot = 0;
    int species_id = 0;
    int individual_label = 0;
    GridCell position;
    Orientation orientation = Orientation::north;
};

/// Color shared by all conspecifics and distinct across species.
[[nodiscard]] Rgb species_color(int species_id);

/// Brighter shade of a species color marking the observing agent itself.
[[nodiscard]] Rgb self_highlight(Rgb base);

/// 2-D gridworld substrate: movement, rotation, collision resolution, and
/// egocentric observation windows. Game rules hook in via the protected
/// virtuals; all game state beyond agent bodies lives in the subclass.
class GridGame : public Environment {
public:
    static constexpr int window_size = 15;
    static constexpr int window_radius = 7;

    GridGame(int height, int width, int episode_length, int num_actions);

    void reset(const std::vector<AgentSeat>& seats, std::uint64_t seed) final;
    StepResult step(const std::vector<int>& joint_action) final;
    [[nodiscard]] Observation observe(int agent_slot) const final;

    [[nodiscard]] int num_agents() const final { return static_cast<int>(agents_.size()); }
    [[nodiscard]] int num_actions() const final { return num_actions_; }
    [[nodiscard]] int episode_length() const final { return episode_length_; }
    [[nodiscard]] int step_index() const final { return step_index_; }
    [[nodiscard]] bool done() const final { return step_index_ >= episode_length_; }
    [[nodiscard]] std::uint64_t rng_draws() const final { return rng_.draws(); }

    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] const AgentBody& agent(int slot) const;

    /// Full-map render: terrain colors with agent bodies drawn on top.
    /// observe() windows are rotated crops of this plus the self-highlight.
    [[nodiscard]] Image render_full() const;

    [[nodiscard]] bool in_bounds(int row, int col) const {
        return row >= 0 && row < height_ && col >= 0 && col < width_;
    }

protected:
    /// Build the map and place agents for a new episode.
    virtual void populate(CountingRng& rng) = 0;

    /// Game phase after movement and special actions; returns per-agent
    /// rewards for this step.
    virtual std::vector<double> resolve_step(CountingRng& rng) = 0;

    [[nodiscard]] virtual Rgb terrain_color(int row, int col) const = 0;

    /// False disables both moves and rotations for the slot (no-op, not error).
    [[nodiscard]] virtual bool agent_can_move(int slot) const;

    /// Terrain that blocks movement in addition to walls and other agents.
    [[nodiscard]] virtual bool cell_blocks_movement(int row, int col) const;

    /// Handle an action code >= 6 for one agent (called after movement).
    virtual void apply_special_action(int slot, int code);

    [[nodiscard]] std::vector<AgentBody>& agents() { return agents_; }
    [[nodiscard]] const std::vector<AgentBody>& agents() const { return agents_; }
    [[nodiscard]] bool cell_occupied(int row, int col) const;
    [[nodiscard]] CountingRng& rng() { return rng_; }

    /// Map color with agent overlay, as used by render_full and observe.
    [[nodiscard]] Rgb color_at(int row, int col) const;

private:
    void apply_movement_phase(const std::vector<int>& joint_action);

    int height_;
    int width_;
    int episode_length_;
    int num_actions_;
    int step_index_ = 0;
    bool started_ = false;
    std::vector<AgentBody> agents_;
    std::vector<double> last_rewards_;
    CountingRng rng_;
};

}  // namespace archipelago
