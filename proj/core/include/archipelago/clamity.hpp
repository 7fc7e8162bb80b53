#pragma once

#include <cstdint>
#include <vector>

#include "archipelago/grid.hpp"

namespace archipelago {

namespace action {
inline constexpr int settle = 6;
}

/// Exploration game: free-swimming agents may irreversibly settle, grow a
/// concentric shell, and filter food proportional to shell size. Shells
/// adjacent to a rival shell are unhealthy and filter nothing. Distant
/// nutrient patches pay a per-step bonus for every patch cell the shell
/// engulfs, so settling immediately is a local optimum only.
struct ClamityConfig {
    int map_height = 36;
    int map_width = 60;
    int episode_length = 250;
    int num_nutrient_patches = 4;
    int nutrient_patch_size = 2;    // patches are size x size cell blocks
    int nutrient_min_distance = 11; // Chebyshev distance from spawn center
    int max_shell_radius = 2;
    int shell_growth_period = 5;    // steps per concentric ring
    double filter_reward_per_cell_per_step = 0.04;
    double nutrient_bonus_per_step = 3.0; // per engulfed patch cell
    int spawn_region = 4;                 // side of the central spawn square

    /// Optional exact placements; when empty, patches sit at quadrant
    /// anchors and agents spawn randomly inside the central region.
    std::vector<GridCell> nutrient_patch_origins;
    std::vector<GridPlacement> fixed_spawns;
};

struct ClamPayload {
    bool settled = false;
    int settle_step = 0;  // step index of the settle action
    int radius = 0;
    bool healthy = true;
    int engulfed_nutrient_cells = 0;
    std::vector<GridCell> shell_cells;
};

enum class ShellHealth { healthy, unhealthy };

class ClamityGame final : public GridGame {
public:
    explicit ClamityGame(const ClamityConfig& config);

    [[nodiscard]] const ClamityConfig& config() const { return config_; }
    [[nodiscard]] const ClamPayload& payload(int slot) const;
    [[nodiscard]] bool nutrient_at(int row, int col) const;
    /// Shell owner slot at a cell, or -1 when unclaimed.
    [[nodiscard]] int shell_owner_at(int row, int col) const;
    [[nodiscard]] const std::vector<GridCell>& nutrient_cells() const { return nutrient_cells_; }
    [[nodiscard]] GridCell spawn_center() const;

    /// Throws ArgumentError while the agent is still swimming.
    [[nodiscard]] ShellHealth shell_health(int slot) const;

    [[nodiscard]] std::unique_ptr<Environment> clone() const override;

protected:
    void populate(CountingRng& rng) override;
    std::vector<double> resolve_step(CountingRng& rng) override;
    [[nodiscard]] Rgb terrain_color(int row, int col) const override;
    [[nodiscard]] bool agent_can_move(int slot) const override;
    [[nodiscard]] bool cell_blocks_movement(int row, int col) const override;
    void apply_special_action(int slot, int code) override;

private:
    [[nodiscard]] std::size_t cell_index(int row, int col) const {
        return static_cast<std::size_t>(row) * config_.map_width + col;
    }
    void claim_cell(int slot, int row, int col);
    void grow_shells(CountingRng& rng);
    void recompute_health();

    ClamityConfig config_;
    std::vector<int> shell_owner_;        // per cell, -1 = unclaimed
    std::vector<std::uint8_t> nutrient_;  // per cell
    std::vector<GridCell> nutrient_cells_;
    std::vector<ClamPayload> payloads_;
};

/// Closed-form return of a lone, unobstructed clam that settles at
/// settle_step and filters until the episode ends (no nutrient engulfed).
/// Matches the simulated return exactly because it performs the same
/// per-step multiply-accumulate as the reward pipeline.
[[nodiscard]] double analytic_settle_return(int settle_step, const ClamityConfig& config);

}  // namespace archipelago
