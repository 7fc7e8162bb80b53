#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "archipelago/env.hpp"
#include "archipelago/games.hpp"
#include "archipelago/image.hpp"

namespace archipelago {

/// Everything needed to re-simulate one logged episode from scratch.
struct EpisodeLogHeader {
    GameConfig game;
    int island_uid = 0;     // seed-derivation index of the island
    int env_island_id = 0;  // identity handed to make_environment
    long ecological_step = 0;
    std::uint64_t env_seed = 0;
    std::vector<AgentSeat> seats;
};

/// One behavior step: the joint action taken, the rewards paid, and the
/// environment's cumulative draw counter afterwards (the lockstep check).
struct EpisodeLogStep {
    std::vector<int> actions;
    std::vector<double> rewards;
    std::uint64_t env_draws = 0;
};

struct EpisodeLog {
    EpisodeLogHeader header;
    std::vector<EpisodeLogStep> steps;
};

/// Text format: a fixed first line, a JSON header line, then one line per
/// step: `t a0 a1 .. | r0 r1 .. | draws` with rewards printed %.17g.
void write_episode_log(const std::filesystem::path& path, const EpisodeLog& log);
[[nodiscard]] EpisodeLog read_episode_log(const std::filesystem::path& path);

struct ReplayResult {
    bool ok = false;
    std::string error;            // first divergence, when !ok
    std::vector<Image> frames;    // full-map renders, one per step plus the initial state
    std::vector<double> returns;  // per seat, re-simulated
};

/// Re-simulates the logged episode and verifies rewards (bit-exact) and
/// draw counters step by step. render=false skips frame capture.
[[nodiscard]] ReplayResult replay_episode(const EpisodeLog& log, bool render);

/// Plain binary PPM (P6) dump, optionally integer-upscaled.
void write_ppm(const std::filesystem::path& path, const Image& image, int scale = 1);

}  // namespace archipelago
