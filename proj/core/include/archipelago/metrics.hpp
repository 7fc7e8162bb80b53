#pragma once

#include <cstdio>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "archipelago/population.hpp"

namespace archipelago {

/// Everything reported for one ecological step. Quantities that do not
/// exist (empty island, game without switching costs) are nulls, never 0.
struct MetricsRow {
    long ecological_step = 0;
    std::vector<long> species_updates;                     // learner updates so far, per species
    std::vector<std::vector<int>> population;              // [island][species]
    std::vector<std::optional<double>> collective_return;  // per island, all species summed
    std::vector<std::optional<double>> per_capita_return;  // collective / island population
    std::vector<std::optional<long>> min_switch_count;     // per island, min over agents
    std::vector<std::optional<double>> solitary_return;    // per species
    std::optional<double> max_collective_return;           // reductions over occupied islands
    std::optional<double> max_per_capita_return;
    std::optional<long> max_population;
    std::optional<long> min_switch_reduction;
};

/// Trailing moving average with partial-window warmup: index n averages
/// the min(n+1, window) latest points. Length-preserving; window 1 is the
/// identity. window < 1 throws ArgumentError.
[[nodiscard]] std::vector<double> smooth(std::span<const double> series, int window);

/// smooth() over a series with holes: nulls are skipped, and a window that
/// contains only nulls yields null.
[[nodiscard]] std::vector<std::optional<double>> smooth_nullable(
    std::span<const std::optional<double>> series, int window);

/// Builds the island-side fields of a row from one ecological step's
/// outcome. switch_counts[i] holds per-slot counts for island i, nullopt
/// when the game tracks none. Caller fills step index, update counters and
/// solitary returns. Shape mismatches throw DataIntegrityError.
[[nodiscard]] MetricsRow island_reductions(
    const FitnessReport& fitness, const Allocation& allocation,
    const std::vector<std::optional<std::vector<int>>>& switch_counts);

/// Which optional column groups a run's CSV carries.
struct MetricsSchema {
    int num_islands = 0;
    int num_species = 0;
    bool switching_columns = false;
    bool solitary_columns = false;

    /// Column names in file order: e, updates_s{l}, pop_i{i}_s{l},
    /// collective_i{i}, percapita_i{i}, minswitch_i{i}, solitary_s{l},
    /// max_collective_return, max_per_capita_return, max_population, min_switching.
    [[nodiscard]] std::vector<std::string> columns() const;
};

/// Single-writer CSV appender. Numbers are printed with %.17g so equal
/// doubles always serialize to identical bytes; nulls are empty fields.
class MetricsWriter {
public:
    /// truncate_to_rows < 0 starts a fresh file with a header; otherwise
    /// the existing file is cut back to that many data rows and appended
    /// to (checkpoint resume).
    MetricsWriter(const std::filesystem::path& path, const MetricsSchema& schema,
                  long truncate_to_rows = -1);
    ~MetricsWriter();

    MetricsWriter(const MetricsWriter&) = delete;
    MetricsWriter& operator=(const MetricsWriter&) = delete;

    void append(const MetricsRow& row);
    void flush();

private:
    MetricsSchema schema_;
    std::FILE* file_ = nullptr;
};

/// Fully parsed metrics file: every cell is a double or null.
struct MetricsTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> rows;

    [[nodiscard]] int column_index(const std::string& name) const;  // -1 when absent
    [[nodiscard]] std::vector<std::optional<double>> column(const std::string& name) const;
};

[[nodiscard]] MetricsTable read_metrics_csv(const std::filesystem::path& path);

/// Shortest-round-trip-style fixed formatting used everywhere a double
/// reaches a text artifact (CSV, JSON configs echoed to disk, SVG).
[[nodiscard]] std::string format_double(double value);

}  // namespace archipelago
