#include "archipelago/scripted.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "archipelago/allelopathy.hpp"
#include "archipelago/clamity.hpp"
#include "archipelago/errors.hpp"
#include "archipelago/grid.hpp"

namespace archipelago {

namespace {

/// Step that closes the gap to `target` along its largest axis; falls back
/// to the other axis and finally to rotating in place when `blocked` vetoes
/// the destination cell. Never suggests an out-of-bounds move.
template <typename BlockedFn>
int greedy_step(const GridGame& grid, GridCell from, GridCell target, BlockedFn blocked) {
    const int dr = target.row - from.row;
    const int dc = target.col - from.col;
    const int row_move = dr < 0 ? action::move_up : action::move_down;
    const int col_move = dc < 0 ? action::move_left : action::move_right;

    std::vector<int> preference;
    if (std::abs(dr) >= std::abs(dc)) {
        if (dr != 0) preference.push_back(row_move);
        if (dc != 0) preference.push_back(col_move);
    } else {
        if (dc != 0) preference.push_back(col_move);
        if (dr != 0) preference.push_back(row_move);
    }
    for (const int move : preference) {
        GridCell next = from;
        switch (move) {
            case action::move_up: next.row -= 1; break;
            case action::move_down: next.row += 1; break;
            case action::move_left: next.col -= 1; break;
            default: next.col += 1; break;
        }
        if (grid.in_bounds(next.row, next.col) && !blocked(next)) return move;
    }
    return action::rotate_left;
}

const ClamityGame& as_clamity(const Environment& env, const char* who) {
    const auto* game = dynamic_cast<const ClamityGame*>(&env);
    if (game == nullptr)
        throw ArgumentError(std::string(who) + " only steers Clamity environments");
    return *game;
}

}  // namespace

int SettleAtStep::select_action(const Environment& env, int slot, CountingRng&) {
    const ClamityGame& game = as_clamity(env, "SettleAtStep");
    if (!game.payload(slot).settled && env.step_index() >= settle_step_)
        return action::universal_count;  // settle
    return action::rotate_left;
}

int SeekNutrientAndSettle::select_action(const Environment& env, int slot, CountingRng&) {
    const ClamityGame& game = as_clamity(env, "SeekNutrientAndSettle");
    if (game.payload(slot).settled) return action::rotate_left;

    const GridCell pos = game.agent(slot).position;
    if (game.nutrient_at(pos.row, pos.col)) return action::universal_count;

    GridCell best{0, 0};
    int best_distance = std::numeric_limits<int>::max();
    for (const GridCell& cell : game.nutrient_cells()) {
        const int distance = std::abs(cell.row - pos.row) + std::abs(cell.col - pos.col);
        if (distance < best_distance) {
            best_distance = distance;
            best = cell;
        }
    }
    if (best_distance == std::numeric_limits<int>::max()) return action::rotate_left;
    return greedy_step(game, pos, best, [&game](GridCell cell) {
        return game.shell_owner_at(cell.row, cell.col) >= 0;
    });
}

int ShrubSpecialist::select_action(const Environment& env, int slot, CountingRng&) {
    const auto* game = dynamic_cast<const AllelopathyGame*>(&env);
    if (game == nullptr) throw ArgumentError("ShrubSpecialist only steers Allelopathy");

    const GridCell pos = game->agent(slot).position;
    // Scan outward by Manhattan rings; the first hit is a nearest grown
    // shrub of the wanted type (ties broken by scan order).
    const int max_d = game->config().map_height + game->config().map_width;
    for (int d = 1; d <= max_d; ++d) {
        for (int dr = -d; dr <= d; ++dr) {
            const int rem = d - std::abs(dr);
            // rem == 0 collapses the two column offsets into one cell.
            for (int side = (rem == 0 ? 1 : 0); side < 2; ++side) {
                const int dc = side == 0 ? -rem : rem;
                const int r = pos.row + dr;
                const int c = pos.col + dc;
                if (!game->in_bounds(r, c)) continue;
                if (game->shrub_state_at(r, c) == ShrubState::grown &&
                    game->shrub_type_at(r, c) == shrub_type_) {
                    // Contact harvests, so stepping on a rival-type shrub
                    // would count as a switch; detour around those cells.
                    return greedy_step(*game, pos, GridCell{r, c}, [game, this](GridCell cell) {
                        return game->shrub_state_at(cell.row, cell.col) == ShrubState::grown &&
                               game->shrub_type_at(cell.row, cell.col) != shrub_type_;
                    });
                }
            }
        }
    }
    return action::rotate_left;  // nothing grown anywhere; wait
}

int UniformRandomController::select_action(const Environment& env, int, CountingRng& rng) {
    return uniform_index(rng, env.num_actions());
}

ScriptedEpisodeResult run_scripted_episode(Environment& env, std::span<const AgentSeat> seats,
                                           std::span<ScriptedController* const> controllers,
                                           std::uint64_t env_seed, std::uint64_t action_seed) {
    if (seats.size() != controllers.size())
        throw ArgumentError("one controller per seat is required");
    env.reset(std::vector<AgentSeat>(seats.begin(), seats.end()), env_seed);
    CountingRng action_rng(action_seed);

    ScriptedEpisodeResult result;
    result.returns.assign(seats.size(), 0.0);
    std::vector<int> joint(seats.size(), 0);
    while (!env.done()) {
        for (std::size_t slot = 0; slot < controllers.size(); ++slot)
            joint[slot] = controllers[slot]->select_action(env, static_cast<int>(slot),
                                                           action_rng);
        const StepResult step = env.step(joint);
        for (std::size_t slot = 0; slot < seats.size(); ++slot)
            result.returns[slot] += step.rewards[slot];
    }
    if (const auto counts = env.switch_counts()) result.switch_counts = *counts;
    result.env_draws = env.rng_draws();
    return result;
}

}  // namespace archipelago
