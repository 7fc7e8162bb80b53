#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace archipelago {

/// Outcome of one acceptance criterion, shared by the acceptance test
/// binary and the CLI oracle command.
struct OracleResult {
    std::string name;
    bool passed = false;
    std::string detail;  // measured numbers, whether it passed or not
};

/// Migration gradient vs. central finite differences of the
/// entropy-regularized objective; 1000 random instances, 2-8 islands.
[[nodiscard]] OracleResult population_gradient_oracle();

/// Iterated weight updates reach the closed-form Gibbs distribution within
/// 1e-3 total variation for 20 random fitness vectors.
[[nodiscard]] OracleResult gibbs_fixed_point_oracle();

/// 10^4 fuzzed allocations: per-species counts always sum to M; empty
/// cells aggregate to fitness exactly 0.
[[nodiscard]] OracleResult conservation_oracle();

/// On-policy corrected targets equal discounted bootstrap returns within
/// 1e-9; zero importance ratios return the raw value estimates exactly.
[[nodiscard]] OracleResult vtrace_reduction_oracle();

/// Policy, baseline and entropy gradients on the tiny network each match
/// central finite differences of the frozen-target loss.
[[nodiscard]] OracleResult learner_gradient_oracle();

/// Scripted settle-at-t returns strictly decrease in t, match the closed
/// form to 1e-9, and seeking nutrient beats settling immediately by >=20%.
[[nodiscard]] OracleResult clamity_ordering_oracle();

/// 16 settlers crammed into the spawn square earn under half the
/// per-capita return of 16 settlers spread >=3 cells apart (20 seeds).
[[nodiscard]] OracleResult clamity_crowding_oracle();

/// Exhaustive harvest sequences of length <= 8: grouping by type maximizes
/// total reward; cap and reset arithmetic match a reference recurrence.
[[nodiscard]] OracleResult streak_ordering_oracle();

/// A type-0 specialist earns strictly more alongside a type-1 specialist
/// than alongside a competing type-0 specialist (100 paired episodes).
[[nodiscard]] OracleResult mutualism_oracle();

/// Full two-timescale run on the 4-island bandit concentrates migration
/// mass >= 0.9 on the paying island within 500 ecological steps.
[[nodiscard]] OracleResult bandit_archipelago_oracle(const std::filesystem::path& scratch);

/// Same (config, seed) twice gives byte-identical metrics and checkpoints;
/// stop-at-checkpoint-and-resume equals the uninterrupted run.
[[nodiscard]] OracleResult determinism_oracle(const std::filesystem::path& scratch);

/// Ring overwrite, exact-batch FIFO dequeue, and boundedness under a 10:1
/// producer/consumer speed ratio.
[[nodiscard]] OracleResult queue_semantics_oracle();

/// Long-running: desk-scale exploration runs (hours). In >= 3 of
/// `num_seeds` seeds the smoothed solitary return must beat the
/// settle-immediately closed form.
[[nodiscard]] OracleResult desk_exploration_oracle(const std::filesystem::path& scratch,
                                                   int num_seeds, long steps);

/// The quick mathematical oracles (the CLI `oracle` command).
[[nodiscard]] std::vector<OracleResult> run_fast_oracle_suite();

}  // namespace archipelago
