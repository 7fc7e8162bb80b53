#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "archipelago/games.hpp"
#include "archipelago/learner.hpp"
#include "archipelago/population.hpp"

namespace archipelago {

/// How individuals are assigned to islands across the run.
enum class ProtocolMode {
    malthusian,        // sampled allocations, migration weights adapt
    fixed_population,  // constant allocation, weights frozen
    single_agent,      // no archipelago; replicated solitary islands only
};

enum class SchedulerKind { sequential, parallel };

[[nodiscard]] std::string to_string(ProtocolMode mode);
[[nodiscard]] std::string to_string(SchedulerKind kind);

struct ExperimentProtocol {
    ProtocolMode mode = ProtocolMode::malthusian;
    int num_islands = 1;
    int num_species = 1;
    int individuals_per_species = 1;
    int fixed_population_size = 0;   // per species per island, fixed-population mode
    bool solitary_islands = false;   // one extra evaluation island per species
    int single_agent_replicas = 32;  // solitary replica count, single-agent mode
};

struct RunConfig {
    long ecological_steps = 10;
    std::uint64_t master_seed = 1;
    SchedulerKind scheduler = SchedulerKind::sequential;
    long checkpoint_interval = 0;  // steps between periodic checkpoints; 0 = final only
    int queue_capacity = 1024;     // trajectory segments per species
    bool log_episodes = false;     // write replayable per-episode logs
    int parallel_workers = 4;      // island workers, parallel scheduler only
};

/// The fully resolved description of one experiment. A run directory's
/// echoed copy of this plus the master seed reproduces the run bit-exactly
/// under the sequential scheduler.
struct ExperimentConfig {
    std::string name;
    GameConfig game;
    ExperimentProtocol protocol;
    PopulationConfig population;  // species counts mirror the protocol fields
    std::string learner_profile = "desk";
    LearnerConfig learner;
    RunConfig run;
};

/// Parses and validates JSON text. Unknown keys anywhere are rejected, and
/// every diagnostic names the offending key path.
[[nodiscard]] ExperimentConfig parse_config_string(const std::string& json_text);

[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

/// Serializes a config with every field present (2-space indent, keys
/// sorted). parse(config_to_json_string(c)) == c.
[[nodiscard]] std::string config_to_json_string(const ExperimentConfig& config);

/// Re-checks every cross-field constraint on an already-built config.
/// Throws ConfigError; never returns a partially usable state.
void validate_config(const ExperimentConfig& config);

/// Standalone game-section (de)serialization, reused by episode logs.
[[nodiscard]] std::string game_config_to_json_string(const GameConfig& game);
[[nodiscard]] GameConfig parse_game_config_string(const std::string& json_text);

struct PresetInfo {
    std::string name;
    std::string summary;
};

/// Built-in experiment configurations: desk-scale defaults plus the
/// published-scale variants (marked long-running in their summaries).
[[nodiscard]] std::vector<PresetInfo> preset_catalog();
[[nodiscard]] bool is_preset(const std::string& name);
[[nodiscard]] ExperimentConfig preset(const std::string& name);

}  // namespace archipelago
