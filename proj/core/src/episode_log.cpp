#include "archipelago/episode_log.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "archipelago/config.hpp"
#include "archipelago/errors.hpp"
#include "archipelago/grid.hpp"
#include "archipelago/metrics.hpp"

namespace archipelago {

namespace {

constexpr const char* kFormatLine = "#archipelago-episode v1";

}  // namespace

void write_episode_log(const std::filesystem::path& path, const EpisodeLog& log) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw StateError("cannot write episode log " + path.string());
    out << kFormatLine << '\n';

    nlohmann::json seats = nlohmann::json::array();
    for (const AgentSeat& seat : log.header.seats)
        seats.push_back({seat.species_id, seat.individual_label});
    const nlohmann::json header{
        {"game", nlohmann::json::parse(game_config_to_json_string(log.header.game))},
        {"island_uid", log.header.island_uid},
        {"env_island_id", log.header.env_island_id},
        {"ecological_step", log.header.ecological_step},
        {"env_seed", log.header.env_seed},
        {"seats", seats}};
    out << header.dump() << '\n';

    for (std::size_t t = 0; t < log.steps.size(); ++t) {
        const EpisodeLogStep& step = log.steps[t];
        out << t;
        for (const int action : step.actions) out << ' ' << action;
        out << " |";
        for (const double reward : step.rewards) out << ' ' << format_double(reward);
        out << " | " << step.env_draws << '\n';
    }
    if (!out) throw StateError("short write to episode log " + path.string());
}

EpisodeLog read_episode_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StateError("cannot open episode log " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kFormatLine)
        throw DataIntegrityError(path.string() + " is not an episode log");
    if (!std::getline(in, line))
        throw DataIntegrityError("episode log is missing its header line");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw DataIntegrityError("unreadable episode log header: " + std::string(e.what()));
    }
    EpisodeLog log;
    try {
        log.header.game = parse_game_config_string(header.at("game").dump());
        log.header.island_uid = header.at("island_uid").get<int>();
        log.header.env_island_id = header.at("env_island_id").get<int>();
        log.header.ecological_step = header.at("ecological_step").get<long>();
        log.header.env_seed = header.at("env_seed").get<std::uint64_t>();
        for (const nlohmann::json& seat : header.at("seats")) {
            if (!seat.is_array() || seat.size() != 2)
                throw DataIntegrityError("malformed seat entry in episode log");
            log.header.seats.push_back(AgentSeat{seat[0].get<int>(), seat[1].get<int>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataIntegrityError("episode log header misses a field: " + std::string(e.what()));
    }

    const std::size_t num_seats = log.header.seats.size();
    std::size_t expected_t = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::size_t t = 0;
        if (!(row >> t) || t != expected_t)
            throw DataIntegrityError("episode log steps are out of order at line " +
                                     std::to_string(expected_t));
        EpisodeLogStep step;
        for (std::size_t slot = 0; slot < num_seats; ++slot) {
            int action = 0;
            if (!(row >> action))
                throw DataIntegrityError("episode log step is missing actions");
            step.actions.push_back(action);
        }
        std::string separator;
        if (!(row >> separator) || separator != "|")
            throw DataIntegrityError("episode log step is missing its reward separator");
        for (std::size_t slot = 0; slot < num_seats; ++slot) {
            double reward = 0.0;
            if (!(row >> reward))
                throw DataIntegrityError("episode log step is missing rewards");
            step.rewards.push_back(reward);
        }
        if (!(row >> separator) || separator != "|")
            throw DataIntegrityError("episode log step is missing its draw separator");
        if (!(row >> step.env_draws))
            throw DataIntegrityError("episode log step is missing the draw counter");
        log.steps.push_back(std::move(step));
        ++expected_t;
    }
    return log;
}

ReplayResult replay_episode(const EpisodeLog& log, bool render) {
    ReplayResult result;
    result.returns.assign(log.header.seats.size(), 0.0);
    const std::unique_ptr<Environment> env =
        make_environment(log.header.game, log.header.env_island_id);
    env->reset(log.header.seats, log.header.env_seed);
    const auto* grid = dynamic_cast<const GridGame*>(env.get());
    const auto capture = [&] {
        if (!render) return;
        result.frames.push_back(grid != nullptr ? grid->render_full()
                                                : Image(1, 1));  // non-spatial game
    };
    capture();
    for (std::size_t t = 0; t < log.steps.size(); ++t) {
        if (env->done()) {
            result.error = "log continues past the episode end at step " + std::to_string(t);
            return result;
        }
        const EpisodeLogStep& expected = log.steps[t];
        const StepResult step = env->step(expected.actions);
        if (step.rewards.size() != expected.rewards.size()) {
            result.error = "reward count diverged at step " + std::to_string(t);
            return result;
        }
        for (std::size_t slot = 0; slot < step.rewards.size(); ++slot) {
            if (step.rewards[slot] != expected.rewards[slot]) {
                result.error = "reward diverged at step " + std::to_string(t) + " slot " +
                               std::to_string(slot) + ": logged " +
                               format_double(expected.rewards[slot]) + ", replayed " +
                               format_double(step.rewards[slot]);
                return result;
            }
            result.returns[slot] += step.rewards[slot];
        }
        if (env->rng_draws() != expected.env_draws) {
            result.error = "environment draw counter diverged at step " + std::to_string(t);
            return result;
        }
        capture();
    }
    if (!env->done()) {
        result.error = "log ends before the episode does";
        return result;
    }
    result.ok = true;
    return result;
}

void write_ppm(const std::filesystem::path& path, const Image& image, int scale) {
    if (scale < 1) throw ArgumentError("ppm scale must be at least 1");
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw StateError("cannot write image " + path.string());
    out << "P6\n" << image.width() * scale << ' ' << image.height() * scale << "\n255\n";
    for (int row = 0; row < image.height(); ++row) {
        std::string line;
        line.reserve(static_cast<std::size_t>(image.width()) * scale * 3);
        for (int col = 0; col < image.width(); ++col) {
            const Rgb color = image.at(row, col);
            for (int s = 0; s < scale; ++s) {
                line.push_back(static_cast<char>(color.r));
                line.push_back(static_cast<char>(color.g));
                line.push_back(static_cast<char>(color.b));
            }
        }
        for (int s = 0; s < scale; ++s) out.write(line.data(), static_cast<long>(line.size()));
    }
    if (!out) throw StateError("short write to image " + path.string());
}

}  // namespace archipelago
