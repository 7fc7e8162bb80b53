#include <cmath>
#include <vector>

#include "archipelago/errors.hpp"
#include "archipelago/vtrace.hpp"
#include "doctest.h"

using namespace archipelago;

TEST_CASE("on-policy targets reduce to the discounted bootstrap return") {
    // Length 2, r = [1, 1], V = 0, bootstrap 0, discount 0.99: v0 = 1.99.
    const std::vector<double> rewards = {1.0, 1.0};
    const std::vector<double> values = {0.0, 0.0};
    const std::vector<double> logp = {-0.7, -0.2};
    const VtraceResult out = vtrace_targets(rewards, values, 0.0, logp, logp, 0.99);
    REQUIRE(out.value_targets.size() == 2);
    CHECK(out.value_targets[0] == doctest::Approx(1.99).epsilon(1e-14));
    CHECK(out.value_targets[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(out.advantages[0] == doctest::Approx(1.99).epsilon(1e-14));  // V = 0
    CHECK(out.advantages[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("bootstrap value feeds the tail") {
    const std::vector<double> rewards = {0.5};
    const std::vector<double> values = {0.0};
    const std::vector<double> logp = {-1.0};
    const VtraceResult out = vtrace_targets(rewards, values, 2.0, logp, logp, 0.9);
    CHECK(out.value_targets[0] == doctest::Approx(0.5 + 0.9 * 2.0).epsilon(1e-14));
}

TEST_CASE("hand-computed off-policy recurrence") {
    // rho0 = c0 = 0.5, rho1 = min(1, e) = 1 under truncation at 1.
    const std::vector<double> rewards = {1.0, 2.0};
    const std::vector<double> values = {3.0, 4.0};
    const double bootstrap = 5.0;
    const double discount = 0.9;
    const std::vector<double> behavior = {0.0, 0.0};
    const std::vector<double> target = {std::log(0.5), 1.0};
    const VtraceResult out = vtrace_targets(rewards, values, bootstrap, behavior, target, discount);
    // delta1 = 1 * (2 + 0.9*5 - 4) = 2.5             -> v1 = 4 + 2.5 = 6.5
    // delta0 = 0.5 * (1 + 0.9*4 - 3) = 0.8
    // v0 = 3 + 0.8 + 0.9 * c0 * (v1 - V1) = 3.8 + 0.9 * 0.5 * 2.5 = 4.925
    CHECK(out.value_targets[1] == doctest::Approx(6.5).epsilon(1e-14));
    CHECK(out.value_targets[0] == doctest::Approx(4.925).epsilon(1e-14));
    // advantage_s = rho_s * (r_s + discount * v_{s+1} - V_s), v_n = bootstrap
    CHECK(out.advantages[0] == doctest::Approx(0.5 * (1.0 + 0.9 * 6.5 - 3.0)).epsilon(1e-14));
    CHECK(out.advantages[1] == doctest::Approx(1.0 * (2.0 + 0.9 * 5.0 - 4.0)).epsilon(1e-14));
}

TEST_CASE("importance ratios are truncated at one") {
    const std::vector<double> rewards = {1.0, -0.5, 0.25};
    const std::vector<double> values = {0.3, -0.1, 0.9};
    const std::vector<double> behavior = {-1.0, -0.5, -2.0};
    std::vector<double> greedy(3);
    for (int i = 0; i < 3; ++i) greedy[i] = behavior[i] + 3.0;  // ratio e^3, clipped to 1
    const VtraceResult clipped = vtrace_targets(rewards, values, 0.7, behavior, greedy, 0.95);
    const VtraceResult on_policy = vtrace_targets(rewards, values, 0.7, behavior, behavior, 0.95);
    for (int i = 0; i < 3; ++i) {
        CHECK(clipped.value_targets[i] == doctest::Approx(on_policy.value_targets[i]).epsilon(1e-14));
        CHECK(clipped.advantages[i] == doctest::Approx(on_policy.advantages[i]).epsilon(1e-14));
    }
}

TEST_CASE("zero importance ratios collapse targets onto the value estimates") {
    const std::vector<double> rewards = {1.0, 2.0, 3.0};
    const std::vector<double> values = {0.25, -0.5, 0.125};
    const std::vector<double> behavior = {-0.5, -0.5, -0.5};
    std::vector<double> hopeless(3, -2000.0);  // exp underflows to exactly 0
    const VtraceResult out = vtrace_targets(rewards, values, 9.0, behavior, hopeless, 0.99);
    for (int i = 0; i < 3; ++i) {
        CHECK(out.value_targets[i] == values[i]);  // bitwise
        CHECK(out.advantages[i] == 0.0);
    }
}

TEST_CASE("input validation") {
    const std::vector<double> two = {1.0, 2.0};
    const std::vector<double> three = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS((void)vtrace_targets(two, three, 0.0, two, two, 0.99), ArgumentError);
    CHECK_THROWS_AS((void)vtrace_targets(two, two, 0.0, three, two, 0.99), ArgumentError);
    CHECK_THROWS_AS((void)vtrace_targets(two, two, 0.0, two, three, 0.99), ArgumentError);
    const std::vector<double> none;
    const VtraceResult empty = vtrace_targets(none, none, 0.0, none, none, 0.99);
    CHECK(empty.value_targets.empty());
    CHECK(empty.advantages.empty());
    CHECK_THROWS_AS((void)vtrace_targets(two, two, 0.0, two, two, -0.1), ArgumentError);
    CHECK_THROWS_AS((void)vtrace_targets(two, two, 0.0, two, two, 1.5), ArgumentError);
}
