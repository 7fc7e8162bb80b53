#pragma once

#include <span>
#include <vector>

namespace archipelago {

struct VtraceResult {
    std::vector<double> value_targets;  // v_s
    std::vector<double> advantages;     // rho_s * (r_s + discount * v_{s+1} - V_s)
};

/// Off-policy corrected targets with both truncation levels fixed at 1:
/// rho_t = c_t = min(1, exp(target_logp_t - behavior_logp_t)),
/// delta_t = rho_t (r_t + g V_{t+1} - V_t) with V_n = bootstrap_value,
/// v_s = V_s + sum_{t>=s} g^{t-s} (prod_{i<t} c_i) delta_t (backward pass),
/// advantage_s uses v_{s+1} with v_n = bootstrap_value.
///
/// On-policy (all ratios 1) this reduces to the discounted bootstrap return;
/// zero ratios collapse v_s to V_s.
[[nodiscard]] VtraceResult vtrace_targets(std::span<const double> rewards,
                                          std::span<const double> values, double bootstrap_value,
                                          std::span<const double> behavior_logp,
                                          std::span<const double> target_logp, double discount);

}  // namespace archipelago
