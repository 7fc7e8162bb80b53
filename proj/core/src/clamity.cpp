#include "archipelago/clamity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "archipelago/errors.hpp"

namespace archipelago {

namespace {

constexpr Rgb kWaterColor{15, 45, 85};
constexpr Rgb kNutrientColor{235, 235, 235};

int chebyshev(GridCell a, GridCell b) {
    return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col));
}

Rgb shell_shade(int species_id) {
    const Rgb c = species_color(species_id);
    return Rgb{static_cast<std::uint8_t>(c.r / 2), static_cast<std::uint8_t>(c.g / 2),
               static_cast<std::uint8_t>(c.b / 2)};
}

void validate(const ClamityConfig& cfg) {
    if (cfg.num_nutrient_patches < 0 || cfg.nutrient_patch_size <= 0) {
        throw ConfigError("clamity: nutrient patch counts/sizes must be non-negative");
    }
    if (cfg.max_shell_radius < 0 || cfg.shell_growth_period <= 0) {
        throw ConfigError("clamity: shell growth parameters out of range");
    }
    if (cfg.filter_reward_per_cell_per_step < 0.0 || cfg.nutrient_bonus_per_step < 0.0) {
        throw ConfigError("clamity: rewards must be non-negative");
    }
    if (cfg.spawn_region <= 0 || cfg.spawn_region > cfg.map_height ||
        cfg.spawn_region > cfg.map_width) {
        throw ConfigError("clamity: spawn_region does not fit the map");
    }
    if (cfg.nutrient_patch_origins.empty() && cfg.num_nutrient_patches > 4) {
        throw ConfigError(
            "clamity: default placement supports at most 4 patches; "
            "provide nutrient_patch_origins");
    }
}

}  // namespace

ClamityGame::ClamityGame(const ClamityConfig& config)
    : GridGame(config.map_height, config.map_width, config.episode_length,
               action::universal_count + 1),
      config_(config) {
    validate(config_);
    nutrient_.assign(static_cast<std::size_t>(config_.map_height) * config_.map_width, 0);

    std::vector<GridCell> origins = config_.nutrient_patch_origins;
    if (origins.empty()) {
        // Quadrant anchors, diagonal pair first so 1..4 patches stay spread out.
        const int h = config_.map_height;
        const int w = config_.map_width;
        const int half = config_.nutrient_patch_size / 2;
        const std::array<GridCell, 4> anchors = {{{h / 4, w / 4},
                                                  {3 * h / 4, 3 * w / 4},
                                                  {h / 4, 3 * w / 4},
                                                  {3 * h / 4, w / 4}}};
        for (int k = 0; k < config_.num_nutrient_patches; ++k) {
            origins.push_back(GridCell{anchors[k].row - half, anchors[k].col - half});
        }
    }
    const GridCell center = spawn_center();
    for (const GridCell& origin : origins) {
        for (int dr = 0; dr < config_.nutrient_patch_size; ++dr) {
            for (int dc = 0; dc < config_.nutrient_patch_size; ++dc) {
                const GridCell cell{origin.row + dr, origin.col + dc};
                if (!in_bounds(cell.row, cell.col)) {
                    throw ConfigError("clamity: nutrient patch extends out of bounds");
                }
                if (chebyshev(cell, center) < config_.nutrient_min_distance) {
                    throw ConfigError("clamity: nutrient patch too close to spawn center");
                }
                auto& flag = nutrient_[cell_index(cell.row, cell.col)];
                if (flag) {
                    throw ConfigError("clamity: nutrient patches overlap");
                }
                flag = 1;
                nutrient_cells_.push_back(cell);
            }
        }
    }
}

GridCell ClamityGame::spawn_center() const {
    return GridCell{(config_.map_height - 1) / 2, (config_.map_width - 1) / 2};
}

const ClamPayload& ClamityGame::payload(int slot) const {
    if (slot < 0 || slot >= num_agents()) {
        throw ArgumentError("ClamityGame::payload: invalid slot " + std::to_string(slot));
    }
    return payloads_[slot];
}

bool ClamityGame::nutrient_at(int row, int col) const {
    return in_bounds(row, col) && nutrient_[cell_index(row, col)] != 0;
}

int ClamityGame::shell_owner_at(int row, int col) const {
    if (!in_bounds(row, col)) return -1;
    return shell_owner_[cell_index(row, col)];
}

void ClamityGame::populate(CountingRng& rng) {
    shell_owner_.assign(static_cast<std::size_t>(config_.map_height) * config_.map_width, -1);
    payloads_.assign(agents().size(), ClamPayload{});
    if (agents().empty()) return;

    if (!config_.fixed_spawns.empty()) {
        if (config_.fixed_spawns.size() != agents().size()) {
            throw ConfigError("clamity: fixed_spawns must cover every agent");
        }
        for (std::size_t i = 0; i < agents().size(); ++i) {
            const GridPlacement& p = config_.fixed_spawns[i];
            if (!in_bounds(p.cell.row, p.cell.col)) {
                throw ConfigError("clamity: fixed spawn out of bounds");
            }
            agents()[i].position = p.cell;
            agents()[i].orientation = p.orientation;
        }
        return;
    }

    const int side = config_.spawn_region;
    if (agents().size() > static_cast<std::size_t>(side) * side) {
        throw ConfigError("clamity: more agents than available spawn cells");
    }
    const int r0 = (config_.map_height - side) / 2;
    const int c0 = (config_.map_width - side) / 2;
    std::vector<GridCell> cells;
    cells.reserve(static_cast<std::size_t>(side) * side);
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
            cells.push_back(GridCell{r0 + r, c0 + c});
        }
    }
    shuffle(cells, rng);
    for (std::size_t i = 0; i < agents().size(); ++i) {
        agents()[i].position = cells[i];
        agents()[i].orientation = static_cast<Orientation>(uniform_index(rng, 4));
    }
}

bool ClamityGame::agent_can_move(int slot) const { return !payloads_[slot].settled; }

bool ClamityGame::cell_blocks_movement(int row, int col) const {
    return shell_owner_[cell_index(row, col)] != -1;
}

void ClamityGame::apply_special_action(int slot, int code) {
    if (code != action::settle) {
        throw ArgumentError("clamity: unknown action code " + std::to_string(code));
    }
    ClamPayload& p = payloads_[slot];
    if (p.settled) return;  // settling twice is a no-op
    p.settled = true;
    p.settle_step = step_index();
    p.radius = 0;
    const GridCell pos = agents()[slot].position;
    if (shell_owner_[cell_index(pos.row, pos.col)] != -1) {
        throw DataIntegrityError("clamity: settle on a claimed cell");
    }
    claim_cell(slot, pos.row, pos.col);
}

void ClamityGame::claim_cell(int slot, int row, int col) {
    shell_owner_[cell_index(row, col)] = slot;
    payloads_[slot].shell_cells.push_back(GridCell{row, col});
    if (nutrient_[cell_index(row, col)]) {
        ++payloads_[slot].engulfed_nutrient_cells;
    }
}

void ClamityGame::grow_shells(CountingRng& rng) {
    std::vector<int> growers;
    for (int slot = 0; slot < num_agents(); ++slot) {
        const ClamPayload& p = payloads_[slot];
        if (!p.settled || p.radius >= config_.max_shell_radius) continue;
        const int age = step_index() - p.settle_step;
        if (age > 0 && age % config_.shell_growth_period == 0) {
            growers.push_back(slot);
        }
    }
    shuffle(growers, rng);
    for (int slot : growers) {
        ClamPayload& p = payloads_[slot];
        const GridCell origin = p.shell_cells.front();
        const int r = p.radius + 1;
        for (int dr = -r; dr <= r; ++dr) {
            for (int dc = -r; dc <= r; ++dc) {
                if (std::max(std::abs(dr), std::abs(dc)) != r) continue;
                const int row = origin.row + dr;
                const int col = origin.col + dc;
                if (!in_bounds(row, col)) continue;
                if (shell_owner_[cell_index(row, col)] != -1) continue;
                if (cell_occupied(row, col)) continue;  // never engulf a swimmer
                bool blocked = false;
                for (int nr = row - 1; nr <= row + 1 && !blocked; ++nr) {
                    for (int nc = col - 1; nc <= col + 1; ++nc) {
                        if (!in_bounds(nr, nc)) continue;
                        const int owner = shell_owner_[cell_index(nr, nc)];
                        if (owner != -1 && owner != slot) {
                            blocked = true;
                            break;
                        }
                    }
                }
                if (blocked) continue;
                claim_cell(slot, row, col);
            }
        }
        // Skipped ring cells are lost for good; the next event targets the
        // next ring out.
        p.radius = r;
    }
}

void ClamityGame::recompute_health() {
    for (int slot = 0; slot < num_agents(); ++slot) {
        ClamPayload& p = payloads_[slot];
        if (!p.settled) continue;
        p.healthy = shell_health(slot) == ShellHealth::healthy;
    }
}

ShellHealth ClamityGame::shell_health(int slot) const {
    const ClamPayload& p = payload(slot);
    if (!p.settled) {
        throw ArgumentError("clamity: shell_health queried for a swimming agent");
    }
    for (const GridCell& cell : p.shell_cells) {
        for (int nr = cell.row - 1; nr <= cell.row + 1; ++nr) {
            for (int nc = cell.col - 1; nc <= cell.col + 1; ++nc) {
                if (!in_bounds(nr, nc)) continue;
                const int owner = shell_owner_[cell_index(nr, nc)];
                if (owner != -1 && owner != slot) return ShellHealth::unhealthy;
            }
        }
    }
    return ShellHealth::healthy;
}

std::vector<double> ClamityGame::resolve_step(CountingRng& rng) {
    grow_shells(rng);
    recompute_health();
    std::vector<double> rewards(agents().size(), 0.0);
    for (int slot = 0; slot < num_agents(); ++slot) {
        const ClamPayload& p = payloads_[slot];
        if (!p.settled || !p.healthy) continue;
        rewards[slot] =
            config_.filter_reward_per_cell_per_step * static_cast<double>(p.shell_cells.size()) +
            config_.nutrient_bonus_per_step * static_cast<double>(p.engulfed_nutrient_cells);
    }
    return rewards;
}

Rgb ClamityGame::terrain_color(int row, int col) const {
    const int owner = shell_owner_[cell_index(row, col)];
    if (owner != -1) return shell_shade(agents()[owner].species_id);
    if (nutrient_[cell_index(row, col)]) return kNutrientColor;
    return kWaterColor;
}

std::unique_ptr<Environment> ClamityGame::clone() const {
    return std::make_unique<ClamityGame>(*this);
}

double analytic_settle_return(int settle_step, const ClamityConfig& config) {
    if (settle_step < 0) {
        throw ArgumentError("analytic_settle_return: negative settle step");
    }
    double total = 0.0;
    for (int u = settle_step; u < config.episode_length; ++u) {
        const int age = u - settle_step;
        const int radius = std::min(age / config.shell_growth_period, config.max_shell_radius);
        const int size = (2 * radius + 1) * (2 * radius + 1);
        total += config.filter_reward_per_cell_per_step * static_cast<double>(size);
    }
    return total;
}

}  // namespace archipelago
