#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "archipelago/config.hpp"
#include "archipelago/population.hpp"
#include "archipelago/trajectory.hpp"

namespace archipelago {

/// One species' learnable state.
struct SpeciesCheckpoint {
    Eigen::VectorXd params;
    Eigen::VectorXd rms;  // RMSProp second-moment accumulator
    std::int64_t update_count = 0;
};

/// Everything needed to continue a run exactly where it stopped. Random
/// streams are re-derived from (master_seed, ecological_step), so no
/// generator state is stored.
struct CheckpointData {
    long ecological_step = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t spec_hash = 0;
    std::vector<SpeciesCheckpoint> species;
    std::vector<SpeciesDistribution> distributions;
    std::vector<std::vector<Trajectory>> queue_segments;  // per species, FIFO order
};

/// Fingerprint of everything that must match for a checkpoint to be
/// loadable: game, protocol, learner shape and batch geometry. Run length
/// and seed are deliberately excluded so a run can be extended.
[[nodiscard]] std::uint64_t experiment_spec_hash(const ExperimentConfig& config);

/// Writes manifest.json, ecology.bin and species_{l}.bin under dir,
/// creating it. Rewrites are atomic per file (tmp + rename).
void write_checkpoint(const std::filesystem::path& dir, const CheckpointData& data);

/// Round-trip of write_checkpoint. Corruption, truncation or a spec-hash
/// mismatch with `expected_spec_hash` throws DataIntegrityError.
[[nodiscard]] CheckpointData read_checkpoint(const std::filesystem::path& dir,
                                             std::uint64_t expected_spec_hash);

/// Largest step_{e} under run_dir/checkpoints, or nullopt when none exist.
[[nodiscard]] std::optional<long> latest_checkpoint_step(const std::filesystem::path& run_dir);

[[nodiscard]] std::filesystem::path checkpoint_dir(const std::filesystem::path& run_dir,
                                                   long ecological_step);

}  // namespace archipelago
