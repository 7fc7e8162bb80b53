#include "archipelago/grid.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "archipelago/errors.hpp"

namespace archipelago {

namespace {

constexpr std::array<Rgb, 10> kSpeciesPalette = {{
    {230, 60, 60},    // red
    {60, 120, 230},   // blue
    {235, 200, 40},   // yellow
    {200, 80, 220},   // magenta
    {60, 220, 220},   // cyan
    {240, 140, 40},   // orange
    {120, 230, 90},   // light green
    {150, 110, 70},   // brown
    {220, 130, 180},  // pink
    {140, 140, 240},  // lavender
}};

struct Delta {
    int drow;
    int dcol;
};

constexpr std::array<Delta, 4> kMoveDelta = {{
    {-1, 0},  // move_up
    {1, 0},   // move_down
    {0, -1},  // move_left
    {0, 1},   // move_right
}};

// Forward unit vector per orientation, and its clockwise perpendicular.
constexpr std::array<Delta, 4> kForward = {{{-1, 0}, {0, 1}, {1, 0}, {0, -1}}};
constexpr std::array<Delta, 4> kRightward = {{{0, 1}, {1, 0}, {0, -1}, {-1, 0}}};

}  // namespace

Rgb species_color(int species_id) {
    if (species_id < 0) {
        throw ArgumentError("species_color: negative species id");
    }
    const Rgb base = kSpeciesPalette[species_id % kSpeciesPalette.size()];
    const int cycle = species_id / static_cast<int>(kSpeciesPalette.size());
    if (cycle == 0) return base;
    // Beyond the base palette, successive cycles shift toward white; ids in
    // practical use (a handful of species) never leave the base palette.
    const auto lift = [cycle](std::uint8_t v) {
        const int shifted = v + (255 - v) * cycle / (cycle + 2);
        return static_cast<std::uint8_t>(shifted);
    };
    return Rgb{lift(base.r), lift(base.g), lift(base.b)};
}

Rgb self_highlight(Rgb base) {
    const auto brighten = [](std::uint8_t v) {
        return static_cast<std::uint8_t>((v + 255) / 2);
    };
    return Rgb{brighten(base.r), brighten(base.g), brighten(base.b)};
}

GridGame::GridGame(int height, int width, int episode_length, int num_actions)
    : height_(height), width_(width), episode_length_(episode_length), num_actions_(num_actions) {
    if (height <= 0 || width <= 0) {
        throw ArgumentError("GridGame: dimensions must be positive");
    }
    if (episode_length <= 0) {
        throw ArgumentError("GridGame: episode_length must be positive");
    }
    if (num_actions < action::universal_count) {
        throw ArgumentError("GridGame: games must keep the six universal actions");
    }
}

// Zero seats is legal: an island that drew no agents still ticks its episode
// clock with the world evolving agentless.
void GridGame::reset(const std::vector<AgentSeat>& seats, std::uint64_t seed) {
    rng_ = CountingRng(seed);
    agents_.clear();
    agents_.reserve(seats.size());
    for (std::size_t i = 0; i < seats.size(); ++i) {
        AgentBody body;
        body.agent_slot = static_cast<int>(i);
        body.species_id = seats[i].species_id;
        body.individual_label = seats[i].individual_label;
        agents_.push_back(body);
    }
    populate(rng_);
    for (const AgentBody& body : agents_) {
        if (!in_bounds(body.position.row, body.position.col)) {
            throw DataIntegrityError("GridGame::reset: agent placed out of bounds");
        }
    }
    for (std::size_t a = 0; a < agents_.size(); ++a) {
        for (std::size_t b = a + 1; b < agents_.size(); ++b) {
            if (agents_[a].position == agents_[b].position) {
                throw DataIntegrityError("GridGame::reset: two agents share a cell");
            }
        }
    }
    last_rewards_.assign(agents_.size(), 0.0);
    step_index_ = 0;
    started_ = true;
}

const AgentBody& GridGame::agent(int slot) const {
    if (slot < 0 || slot >= num_agents()) {
        throw ArgumentError("GridGame::agent: invalid slot " + std::to_string(slot));
    }
    return agents_[slot];
}

bool GridGame::agent_can_move(int /*slot*/) const { return true; }

bool GridGame::cell_blocks_movement(int /*row*/, int /*col*/) const { return false; }

void GridGame::apply_special_action(int /*slot*/, int /*code*/) {}

bool GridGame::cell_occupied(int row, int col) const {
    for (const AgentBody& body : agents_) {
        if (body.position.row == row && body.position.col == col) return true;
    }
    return false;
}

void GridGame::apply_movement_phase(const std::vector<int>& joint_action) {
    std::vector<int> movers;
    for (std::size_t slot = 0; slot < joint_action.size(); ++slot) {
        const int code = joint_action[slot];
        if (!agent_can_move(static_cast<int>(slot))) continue;
        if (code == action::rotate_left) {
            auto& o = agents_[slot].orientation;
            o = static_cast<Orientation>((static_cast<int>(o) + 3) % 4);
        } else if (code == action::rotate_right) {
            auto& o = agents_[slot].orientation;
            o = static_cast<Orientation>((static_cast<int>(o) + 1) % 4);
        } else if (code >= action::move_up && code <= action::move_right) {
            movers.push_back(static_cast<int>(slot));
        }
    }
    // Simultaneous moves resolve in uniformly random priority order; a move
    // into a wall, blocking terrain, or a still-occupied cell is dropped.
    shuffle(movers, rng_);
    for (int slot : movers) {
        const Delta d = kMoveDelta[joint_action[slot]];
        const int row = agents_[slot].position.row + d.drow;
        const int col = agents_[slot].position.col + d.dcol;
        if (!in_bounds(row, col)) continue;
        if (cell_blocks_movement(row, col)) continue;
        if (cell_occupied(row, col)) continue;
        agents_[slot].position = GridCell{row, col};
    }
}

StepResult GridGame::step(const std::vector<int>& joint_action) {
    if (!started_) {
        throw StateError("GridGame::step: reset() has not been called");
    }
    if (done()) {
        throw StateError("GridGame::step: episode already finished");
    }
    if (joint_action.size() != agents_.size()) {
        throw ArgumentError("GridGame::step: expected " + std::to_string(agents_.size()) +
                            " actions, got " + std::to_string(joint_action.size()));
    }
    for (int code : joint_action) {
        if (code < 0 || code >= num_actions_) {
            throw ArgumentError("GridGame::step: action code " + std::to_string(code) +
                                " out of range");
        }
    }
    apply_movement_phase(joint_action);
    for (std::size_t slot = 0; slot < joint_action.size(); ++slot) {
        if (joint_action[slot] >= action::universal_count) {
            apply_special_action(static_cast<int>(slot), joint_action[slot]);
        }
    }
    std::vector<double> rewards = resolve_step(rng_);
    if (rewards.size() != agents_.size()) {
        throw DataIntegrityError("GridGame::step: game produced wrong reward count");
    }
    last_rewards_ = rewards;
    ++step_index_;
    return StepResult{std::move(rewards), done()};
}

Rgb GridGame::color_at(int row, int col) const {
    for (const AgentBody& body : agents_) {
        if (body.position.row == row && body.position.col == col) {
            return species_color(body.species_id);
        }
    }
    return terrain_color(row, col);
}

Image GridGame::render_full() const {
    Image img(height_, width_);
    for (int row = 0; row < height_; ++row) {
        for (int col = 0; col < width_; ++col) {
            img.set(row, col, color_at(row, col));
        }
    }
    return img;
}

Observation GridGame::observe(int agent_slot) const {
    const AgentBody& body = agent(agent_slot);
    const Delta f = kForward[static_cast<int>(body.orientation)];
    const Delta r = kRightward[static_cast<int>(body.orientation)];
    Observation obs;
    obs.pixels = Image(window_size, window_size);
    for (int i = 0; i < window_size; ++i) {
        for (int j = 0; j < window_size; ++j) {
            const int ahead = window_radius - i;
            const int aside = j - window_radius;
            const int row = body.position.row + ahead * f.drow + aside * r.drow;
            const int col = body.position.col + ahead * f.dcol + aside * r.dcol;
            if (!in_bounds(row, col)) continue;  // void stays black
            if (row == body.position.row && col == body.position.col) {
                obs.pixels.set(i, j, self_highlight(species_color(body.species_id)));
            } else {
                obs.pixels.set(i, j, color_at(row, col));
            }
        }
    }
    obs.last_reward = last_rewards_[agent_slot];
    return obs;
}

}  // namespace archipelago
