#include "archipelago/allelopathy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "archipelago/errors.hpp"

namespace archipelago {

namespace {

constexpr Rgb kFieldColor{38, 32, 24};

constexpr std::array<Rgb, 6> kShrubPalette = {{
    {50, 205, 70},    // type 0: green
    {170, 90, 230},   // type 1: violet
    {240, 200, 60},   // type 2: amber
    {70, 180, 220},   // type 3: teal
    {230, 110, 60},   // type 4: rust
    {200, 220, 120},  // type 5: pale lime
}};

Rgb seed_shade(Rgb grown) {
    return Rgb{static_cast<std::uint8_t>(grown.r / 3), static_cast<std::uint8_t>(grown.g / 3),
               static_cast<std::uint8_t>(grown.b / 3)};
}

void validate(const AllelopathyConfig& cfg) {
    if (cfg.num_shrub_types < 1 || cfg.num_shrub_types > static_cast<int>(kShrubPalette.size())) {
        throw ConfigError("allelopathy: num_shrub_types must be in 1..6");
    }
    if (static_cast<int>(cfg.streak_caps.size()) != cfg.num_shrub_types) {
        throw ConfigError("allelopathy: streak_caps must list one cap per type");
    }
    for (double cap : cfg.streak_caps) {
        if (cap < 1.0) throw ConfigError("allelopathy: streak caps must be >= 1");
    }
    if (static_cast<int>(cfg.type_frequencies.size()) != cfg.num_shrub_types) {
        throw ConfigError("allelopathy: type_frequencies must list one share per type");
    }
    double sum = 0.0;
    for (double f : cfg.type_frequencies) {
        if (f < 0.0) throw ConfigError("allelopathy: type frequencies must be non-negative");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("allelopathy: type frequencies must sum to 1");
    }
    if (cfg.initial_density < 0.0 || cfg.initial_density > 1.0) {
        throw ConfigError("allelopathy: initial_density must be in [0,1]");
    }
    if (cfg.base_regrowth_probability < 0.0 || cfg.base_regrowth_probability > 1.0) {
        throw ConfigError("allelopathy: base_regrowth_probability must be a probability");
    }
    if (cfg.suppression_radius < 0) {
        throw ConfigError("allelopathy: suppression_radius must be non-negative");
    }
}

}  // namespace

HarvestOutcome harvest_reward(const DigestivePayload& payload, int harvested_type,
                              const AllelopathyConfig& config) {
    if (harvested_type < 0 || harvested_type >= config.num_shrub_types) {
        throw ArgumentError("harvest_reward: unknown shrub type " +
                            std::to_string(harvested_type));
    }
    HarvestOutcome out;
    out.payload = payload;
    if (payload.last_type == harvested_type || payload.last_type == -1) {
        out.payload.streak = payload.streak + 1;
        out.reward = std::min(static_cast<double>(out.payload.streak),
                              config.streak_caps[harvested_type]);
    } else {
        out.payload.streak = 1;
        out.reward = 1.0;
        ++out.payload.switch_count;
    }
    out.payload.last_type = harvested_type;
    return out;
}

AllelopathyGame::AllelopathyGame(const AllelopathyConfig& config)
    : GridGame(config.map_height, config.map_width, config.episode_length,
               action::universal_count),
      config_(config) {
    validate(config_);
}

ShrubState AllelopathyGame::shrub_state_at(int row, int col) const {
    if (!in_bounds(row, col)) {
        throw ArgumentError("allelopathy: cell out of bounds");
    }
    return state_[cell_index(row, col)];
}

int AllelopathyGame::shrub_type_at(int row, int col) const {
    if (shrub_state_at(row, col) == ShrubState::none) {
        throw ArgumentError("allelopathy: cell holds no shrub");
    }
    return type_[cell_index(row, col)];
}

const DigestivePayload& AllelopathyGame::payload(int slot) const {
    if (slot < 0 || slot >= num_agents()) {
        throw ArgumentError("AllelopathyGame::payload: invalid slot " + std::to_string(slot));
    }
    return payloads_[slot];
}

std::optional<std::vector<int>> AllelopathyGame::switch_counts() const {
    std::vector<int> counts(payloads_.size());
    for (std::size_t i = 0; i < payloads_.size(); ++i) counts[i] = payloads_[i].switch_count;
    return counts;
}

std::vector<int> AllelopathyGame::shrub_census() const {
    std::vector<int> census(config_.num_shrub_types, 0);
    for (std::size_t i = 0; i < state_.size(); ++i) {
        if (state_[i] != ShrubState::none) ++census[type_[i]];
    }
    return census;
}

void AllelopathyGame::populate(CountingRng& rng) {
    const std::size_t cells = static_cast<std::size_t>(config_.map_height) * config_.map_width;
    state_.assign(cells, ShrubState::none);
    type_.assign(cells, 0);
    payloads_.assign(agents().size(), DigestivePayload{});

    if (!config_.fixed_shrubs.empty()) {
        for (const ShrubPlacement& p : config_.fixed_shrubs) {
            if (!in_bounds(p.cell.row, p.cell.col)) {
                throw ConfigError("allelopathy: fixed shrub out of bounds");
            }
            if (p.type < 0 || p.type >= config_.num_shrub_types) {
                throw ConfigError("allelopathy: fixed shrub type out of range");
            }
            const std::size_t idx = cell_index(p.cell.row, p.cell.col);
            if (state_[idx] != ShrubState::none) {
                throw ConfigError("allelopathy: fixed shrubs overlap");
            }
            state_[idx] = p.grown ? ShrubState::grown : ShrubState::seed;
            type_[idx] = static_cast<std::uint8_t>(p.type);
        }
    } else {
        // Random layout: a density-sized sample of cells, each grown at reset,
        // typed by the configured frequencies.
        std::vector<int> order(cells);
        std::iota(order.begin(), order.end(), 0);
        shuffle(order, rng);
        const auto num_shrubs =
            static_cast<std::size_t>(std::llround(config_.initial_density * cells));
        for (std::size_t k = 0; k < num_shrubs && k < cells; ++k) {
            const int t = categorical(rng, config_.type_frequencies);
            state_[order[k]] = ShrubState::grown;
            type_[order[k]] = static_cast<std::uint8_t>(t);
        }
    }

    if (agents().empty()) return;
    if (!config_.fixed_spawns.empty()) {
        if (config_.fixed_spawns.size() != agents().size()) {
            throw ConfigError("allelopathy: fixed_spawns must cover every agent");
        }
        for (std::size_t i = 0; i < agents().size(); ++i) {
            const GridPlacement& p = config_.fixed_spawns[i];
            if (!in_bounds(p.cell.row, p.cell.col)) {
                throw ConfigError("allelopathy: fixed spawn out of bounds");
            }
            agents()[i].position = p.cell;
            agents()[i].orientation = p.orientation;
        }
        return;
    }
    // Uniform placement over distinct cells anywhere on the field.
    if (agents().size() > cells) {
        throw ConfigError("allelopathy: more agents than cells");
    }
    std::vector<std::uint8_t> taken(cells, 0);
    for (AgentBody& body : agents()) {
        for (;;) {
            const int row = static_cast<int>(uniform_index(rng, config_.map_height));
            const int col = static_cast<int>(uniform_index(rng, config_.map_width));
            if (taken[cell_index(row, col)]) continue;
            taken[cell_index(row, col)] = 1;
            body.position = GridCell{row, col};
            break;
        }
        body.orientation = static_cast<Orientation>(uniform_index(rng, 4));
    }
}

double AllelopathyGame::regrowth_probability(int row, int col) const {
    if (shrub_state_at(row, col) != ShrubState::seed) {
        throw ArgumentError("allelopathy: regrowth_probability needs a seed cell");
    }
    const int own_type = type_[cell_index(row, col)];
    int n_other = 0;
    const int radius = config_.suppression_radius;
    for (int r = row - radius; r <= row + radius; ++r) {
        for (int c = col - radius; c <= col + radius; ++c) {
            if (!in_bounds(r, c)) continue;
            const std::size_t idx = cell_index(r, c);
            if (state_[idx] == ShrubState::grown && type_[idx] != own_type) ++n_other;
        }
    }
    return config_.base_regrowth_probability / (1.0 + static_cast<double>(n_other));
}

std::vector<double> AllelopathyGame::resolve_step(CountingRng& rng) {
    std::vector<double> rewards(agents().size(), 0.0);
    // Harvest by contact, in slot order (cells hold at most one agent, so
    // order never changes the outcome).
    for (int slot = 0; slot < num_agents(); ++slot) {
        const GridCell pos = agents()[slot].position;
        const std::size_t idx = cell_index(pos.row, pos.col);
        if (state_[idx] != ShrubState::grown) continue;
        state_[idx] = ShrubState::seed;  // same-type seed stays behind
        const HarvestOutcome out = harvest_reward(payloads_[slot], type_[idx], config_);
        payloads_[slot] = out.payload;
        rewards[slot] = out.reward;
    }
    // Synchronous regrowth: probabilities read the post-harvest field, all
    // flips land together. Row-major draw order, one draw per seed.
    std::vector<std::size_t> sprouting;
    for (int row = 0; row < config_.map_height; ++row) {
        for (int col = 0; col < config_.map_width; ++col) {
            const std::size_t idx = cell_index(row, col);
            if (state_[idx] != ShrubState::seed) continue;
            if (uniform_double(rng) < regrowth_probability(row, col)) {
                sprouting.push_back(idx);
            }
        }
    }
    for (std::size_t idx : sprouting) state_[idx] = ShrubState::grown;
    return rewards;
}

Rgb AllelopathyGame::terrain_color(int row, int col) const {
    const std::size_t idx = cell_index(row, col);
    switch (state_[idx]) {
        case ShrubState::grown:
            return kShrubPalette[type_[idx]];
        case ShrubState::seed:
            return seed_shade(kShrubPalette[type_[idx]]);
        case ShrubState::none:
            break;
    }
    return kFieldColor;
}

std::unique_ptr<Environment> AllelopathyGame::clone() const {
    return std::make_unique<AllelopathyGame>(*this);
}

}  // namespace archipelago
