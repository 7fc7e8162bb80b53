// Acceptance gate: every release criterion runs here, one line of output
// each. Exit status 0 means every executed criterion passed. The desk
// exploration study takes hours, so it only runs with --long; without it
// the line reports [SKIP] and does not affect the exit status.
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "archipelago/oracles.hpp"

namespace {

std::filesystem::path make_scratch() {
    std::random_device rd;
    const auto path = std::filesystem::temp_directory_path() /
                      ("archipelago-acceptance-" + std::to_string(rd()) + "-" +
                       std::to_string(rd()));
    std::filesystem::create_directories(path);
    return path;
}

void report(const archipelago::OracleResult& result, bool& all_passed) {
    std::printf("[%s] %s: %s\n", result.passed ? "PASS" : "FAIL", result.name.c_str(),
                result.detail.c_str());
    std::fflush(stdout);
    all_passed = all_passed && result.passed;
}

}  // namespace

int main(int argc, char** argv) {
    bool run_long = false;
    long long_steps = 20000;
    int long_seeds = 5;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--long") == 0) {
            run_long = true;
        } else if (std::strcmp(argv[i], "--long-steps") == 0 && i + 1 < argc) {
            long_steps = std::strtol(argv[++i], nullptr, 10);
        } else if (std::strcmp(argv[i], "--long-seeds") == 0 && i + 1 < argc) {
            long_seeds = static_cast<int>(std::strtol(argv[++i], nullptr, 10));
        } else {
            std::fprintf(stderr,
                         "usage: acceptance [--long] [--long-steps N] [--long-seeds N]\n");
            return 2;
        }
    }

    const std::filesystem::path scratch = make_scratch();
    bool all_passed = true;

    report(archipelago::population_gradient_oracle(), all_passed);
    report(archipelago::gibbs_fixed_point_oracle(), all_passed);
    report(archipelago::conservation_oracle(), all_passed);
    report(archipelago::vtrace_reduction_oracle(), all_passed);
    report(archipelago::learner_gradient_oracle(), all_passed);
    report(archipelago::clamity_ordering_oracle(), all_passed);
    report(archipelago::clamity_crowding_oracle(), all_passed);
    report(archipelago::streak_ordering_oracle(), all_passed);
    report(archipelago::mutualism_oracle(), all_passed);
    report(archipelago::bandit_archipelago_oracle(scratch / "bandit"), all_passed);
    report(archipelago::determinism_oracle(scratch / "determinism"), all_passed);
    report(archipelago::queue_semantics_oracle(), all_passed);

    if (run_long) {
        report(archipelago::desk_exploration_oracle(scratch / "exploration", long_seeds,
                                                    long_steps),
               all_passed);
    } else {
        std::printf(
            "[SKIP] desk-exploration: long-running study; rerun with --long "
            "(~hours at full scale)\n");
    }

    std::error_code ec;
    std::filesystem::remove_all(scratch, ec);

    std::printf("%s\n", all_passed ? "acceptance: all executed criteria passed"
                                   : "acceptance: at least one criterion FAILED");
    return all_passed ? 0 : 1;
}
