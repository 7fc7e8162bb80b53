#include "archipelago/vtrace.hpp"

#include <algorithm>
#include <cmath>

#include "archipelago/errors.hpp"

namespace archipelago {

VtraceResult vtrace_targets(std::span<const double> rewards, std::span<const double> values,
                            double bootstrap_value, std::span<const double> behavior_logp,
                            std::span<const double> target_logp, double discount) {
    const std::size_t n = rewards.size();
    if (values.size() != n || behavior_logp.size() != n || target_logp.size() != n) {
        throw ArgumentError("vtrace_targets: sequence lengths differ");
    }
    if (discount < 0.0 || discount >= 1.0) {
        throw ArgumentError("vtrace_targets: discount must lie in [0,1)");
    }
    VtraceResult out;
    out.value_targets.resize(n);
    out.advantages.resize(n);
    if (n == 0) return out;

    std::vector<double> rho(n);
    std::vector<double> delta(n);
    for (std::size_t t = 0; t < n; ++t) {
        rho[t] = std::min(1.0, std::exp(target_logp[t] - behavior_logp[t]));
        const double next_value = (t + 1 < n) ? values[t + 1] : bootstrap_value;
        delta[t] = rho[t] * (rewards[t] + discount * next_value - values[t]);
    }
    // A_s = delta_s + discount * c_s * A_{s+1}; with truncation 1, c_s = rho_s.
    double acc = 0.0;
    for (std::size_t s = n; s-- > 0;) {
        acc = delta[s] + discount * rho[s] * acc;
        out.value_targets[s] = values[s] + acc;
    }
    for (std::size_t s = 0; s < n; ++s) {
        const double next_target = (s + 1 < n) ? out.value_targets[s + 1] : bootstrap_value;
        out.advantages[s] = rho[s] * (rewards[s] + discount * next_target - values[s]);
    }
    return out;
}

}  // namespace archipelago
