#pragma once

#include <cstdint>
#include <vector>

#include "archipelago/grid.hpp"

namespace archipelago {

enum class ShrubState : std::uint8_t { none = 0, seed = 1, grown = 2 };

struct ShrubPlacement {
    GridCell cell;
    int type = 0;
    bool grown = true;
};

/// Foraging game: shrubs of several types suppress each other's regrowth
/// (a seed's per-step growth chance shrinks with nearby grown shrubs of
/// other types), while agents earn streak rewards for harvesting the same
/// type repeatedly and drop back to 1 whenever they switch.
struct AllelopathyConfig {
    int map_height = 36;
    int map_width = 60;
    int episode_length = 1000;
    int num_shrub_types = 2;
    /// Per-type streak reward caps; sized num_shrub_types.
    std::vector<double> streak_caps = {250.0, 250.0};
    /// Per-type share of shrub cells; sized num_shrub_types, sums to 1.
    std::vector<double> type_frequencies = {0.5, 0.5};
    double initial_density = 0.25;  // fraction of cells holding a shrub at reset
    double base_regrowth_probability = 0.05;
    int suppression_radius = 2;  // Chebyshev

    /// Optional exact layout/spawns for scripted scenarios; when empty the
    /// field and agents are placed uniformly at random.
    std::vector<ShrubPlacement> fixed_shrubs;
    std::vector<GridPlacement> fixed_spawns;
};

struct DigestivePayload {
    int last_type = -1;  // -1 before the first harvest
    int streak = 0;
    int switch_count = 0;
};

/// Streak bookkeeping for one harvest: same type as last (or first ever)
/// extends the streak and pays min(streak, cap); a different type resets
/// the streak to 1, pays 1, and counts a switching cost.
struct HarvestOutcome {
    double reward = 0.0;
    DigestivePayload payload;
};
[[nodiscard]] HarvestOutcome harvest_reward(const DigestivePayload& payload, int harvested_type,
                                            const AllelopathyConfig& config);

class AllelopathyGame final : public GridGame {
public:
    explicit AllelopathyGame(const AllelopathyConfig& config);

    [[nodiscard]] const AllelopathyConfig& config() const { return config_; }
    [[nodiscard]] ShrubState shrub_state_at(int row, int col) const;
    [[nodiscard]] int shrub_type_at(int row, int col) const;
    [[nodiscard]] const DigestivePayload& payload(int slot) const;
    [[nodiscard]] std::optional<std::vector<int>> switch_counts() const override;

    /// Per-step growth chance of the seed at (row, col):
    /// p0 / (1 + grown shrubs of other types within the suppression radius).
    /// Throws ArgumentError when the cell does not hold a seed.
    [[nodiscard]] double regrowth_probability(int row, int col) const;

    /// Count of (seed + grown) cells per type; constant within an episode.
    [[nodiscard]] std::vector<int> shrub_census() const;

    [[nodiscard]] std::unique_ptr<Environment> clone() const override;

protected:
    void populate(CountingRng& rng) override;
    std::vector<double> resolve_step(CountingRng& rng) override;
    [[nodiscard]] Rgb terrain_color(int row, int col) const override;

private:
    [[nodiscard]] std::size_t cell_index(int row, int col) const {
        return static_cast<std::size_t>(row) * config_.map_width + col;
    }

    AllelopathyConfig config_;
    std::vector<ShrubState> state_;
    std::vector<std::uint8_t> type_;
    std::vector<DigestivePayload> payloads_;
};

}  // namespace archipelago
