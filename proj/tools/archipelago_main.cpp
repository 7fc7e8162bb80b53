#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "archipelago/checkpoint.hpp"
#include "archipelago/config.hpp"
#include "archipelago/episode_log.hpp"
#include "archipelago/errors.hpp"
#include "archipelago/games.hpp"
#include "archipelago/learner.hpp"
#include "archipelago/metrics.hpp"
#include "archipelago/net.hpp"
#include "archipelago/oracles.hpp"
#include "archipelago/orchestrator.hpp"
#include "archipelago/rng.hpp"
#include "archipelago/scripted.hpp"
#include "archipelago/svg_plot.hpp"
#include "archipelago/version.hpp"

namespace {

using namespace archipelago;

/// Relative output paths are placed under $ARCHIPELAGO_OUTPUT_ROOT when the
/// variable is set, so batch drivers can redirect every artifact tree
/// without touching per-command flags.
[[nodiscard]] std::filesystem::path resolve_output(const std::filesystem::path& path) {
    if (path.is_absolute()) return path;
    const char* root = std::getenv("ARCHIPELAGO_OUTPUT_ROOT");
    if (root == nullptr || *root == '\0') return path;
    return std::filesystem::path(root) / path;
}

[[nodiscard]] ExperimentConfig config_from_flags(const std::string& config_path,
                                                 const std::string& preset_name) {
    if (!config_path.empty() && !preset_name.empty())
        throw ArgumentError("--config and --preset are mutually exclusive");
    if (!config_path.empty()) return load_config(config_path);
    if (!preset_name.empty()) return preset(preset_name);
    throw ArgumentError("one of --config or --preset is required");
}

struct RunFlags {
    std::string config_path;
    std::string preset_name;
    std::string out_dir;
    std::string scheduler;
    std::uint64_t seed = 0;
    bool seed_set = false;
    long steps = -1;
    bool resume = false;
    bool log_episodes = false;
};

int cmd_run(const RunFlags& flags) {
    if (flags.resume) {
        if (flags.out_dir.empty()) throw ArgumentError("--resume requires --out <run_dir>");
        std::optional<long> extend;
        if (flags.steps >= 0) extend = flags.steps;
        Experiment experiment =
            Experiment::resume(resolve_output(flags.out_dir), extend);
        experiment.run();
        std::cout << "resumed " << experiment.run_dir().string() << " through step "
                  << experiment.ecological_step() << "\n";
        return 0;
    }

    ExperimentConfig config = config_from_flags(flags.config_path, flags.preset_name);
    if (flags.seed_set) config.run.master_seed = flags.seed;
    if (flags.steps >= 0) config.run.ecological_steps = flags.steps;
    if (!flags.scheduler.empty())
        config.run.scheduler =
            flags.scheduler == "parallel" ? SchedulerKind::parallel : SchedulerKind::sequential;
    if (flags.log_episodes) config.run.log_episodes = true;
    validate_config(config);

    std::filesystem::path out = flags.out_dir.empty()
                                    ? std::filesystem::path("runs") /
                                          (config.name + "-seed" +
                                           std::to_string(config.run.master_seed))
                                    : std::filesystem::path(flags.out_dir);
    out = resolve_output(out);

    Experiment experiment(config, out);
    experiment.run();
    std::cout << "run complete: " << experiment.run_dir().string() << " ("
              << experiment.ecological_step() << " ecological steps)\n";
    return 0;
}

struct EvalFlags {
    std::string config_path;
    std::string preset_name;
    std::string policy;
    std::string run_dir;
    int species = 0;
    int island = 0;
    int settle_step = 0;
    int episodes = 1;
    std::uint64_t seed = 1;
};

[[nodiscard]] std::unique_ptr<ScriptedController> make_controller(const std::string& kind,
                                                                  int settle_step) {
    if (kind == "settle-immediately") return std::make_unique<SettleAtStep>(0);
    if (kind == "settle-at-step") return std::make_unique<SettleAtStep>(settle_step);
    if (kind == "seek-nutrient") return std::make_unique<SeekNutrientAndSettle>();
    if (kind == "pure-A-forager") return std::make_unique<ShrubSpecialist>(0);
    if (kind == "pure-B-forager") return std::make_unique<ShrubSpecialist>(1);
    if (kind == "uniform-random") return std::make_unique<UniformRandomController>();
    throw ArgumentError("unknown --policy '" + kind +
                        "' (expected settle-immediately, settle-at-step, seek-nutrient, "
                        "pure-A-forager, pure-B-forager or uniform-random)");
}

/// Plays one greedy-free episode with a checkpointed policy network acting
/// alone, mirroring the orchestrator's solitary-island evaluation.
[[nodiscard]] double run_learned_episode(const GameConfig& game, const Net& net, int species,
                                         int island, std::uint64_t env_seed,
                                         std::uint64_t action_seed) {
    auto env = make_environment(game, island);
    const std::vector<AgentSeat> seats{AgentSeat{species, 0}};
    env->reset(seats, env_seed);
    LstmState state = net.initial_state();
    CountingRng rng(action_seed);
    double last_reward = 0.0;
    double episode_return = 0.0;
    while (!env->done()) {
        const Observation obs = env->observe(0);
        const ActResult chosen = act(net, obs.pixels, last_reward, state, rng);
        const StepResult result = env->step({chosen.action});
        last_reward = result.rewards[0];
        episode_return += last_reward;
    }
    return episode_return;
}

int cmd_eval(const EvalFlags& flags) {
    if (flags.policy.empty() == flags.run_dir.empty())
        throw ArgumentError("exactly one of --policy or --run is required");
    if (flags.episodes < 1) throw ArgumentError("--episodes must be >= 1");

    GameConfig game;
    std::optional<Net> net;
    if (!flags.run_dir.empty()) {
        const std::filesystem::path run_dir = resolve_output(flags.run_dir);
        const ExperimentConfig config = load_config(run_dir / "config.json");
        game = config.game;
        const std::optional<long> step = latest_checkpoint_step(run_dir);
        if (!step) throw StateError("no checkpoints under " + run_dir.string());
        const CheckpointData data =
            read_checkpoint(checkpoint_dir(run_dir, *step), experiment_spec_hash(config));
        if (flags.species < 0 || flags.species >= static_cast<int>(data.species.size()))
            throw ArgumentError("--species out of range (run has " +
                                std::to_string(data.species.size()) + " species)");
        net.emplace(NetSpec::profile(config.learner_profile, game_num_actions(config.game)));
        if (net->params().size() != data.species[flags.species].params.size())
            throw DataIntegrityError("checkpoint parameter count does not match the profile");
        net->params() = data.species[flags.species].params;
        std::cout << "policy: checkpoint step " << *step << ", species " << flags.species
                  << " from " << run_dir.string() << "\n";
    } else {
        const ExperimentConfig config = config_from_flags(
            flags.config_path, flags.preset_name.empty() && flags.config_path.empty()
                                   ? std::string("clamity-desk")
                                   : flags.preset_name);
        game = config.game;
        std::cout << "policy: scripted " << flags.policy << "\n";
    }

    double total = 0.0;
    for (int ep = 0; ep < flags.episodes; ++ep) {
        const std::uint64_t env_seed = derive_seed(flags.seed, seed_tag::environment, ep);
        const std::uint64_t action_seed = derive_seed(flags.seed, seed_tag::action, ep);
        double episode_return = 0.0;
        std::string suffix;
        if (net) {
            episode_return =
                run_learned_episode(game, *net, flags.species, flags.island, env_seed,
                                    action_seed);
        } else {
            auto env = make_environment(game, flags.island);
            const std::unique_ptr<ScriptedController> controller =
                make_controller(flags.policy, flags.settle_step);
            const std::vector<AgentSeat> seats{AgentSeat{flags.species, 0}};
            ScriptedController* raw = controller.get();
            const ScriptedEpisodeResult result =
                run_scripted_episode(*env, seats, std::span<ScriptedController* const>(&raw, 1),
                                     env_seed, action_seed);
            episode_return = result.returns.at(0);
            if (!result.switch_counts.empty())
                suffix = "  switches " + std::to_string(result.switch_counts.at(0));
        }
        total += episode_return;
        std::cout << "episode " << ep << ": return " << format_double(episode_return) << suffix
                  << "\n";
    }
    std::cout << "mean return " << format_double(total / flags.episodes) << " over "
              << flags.episodes << " episode" << (flags.episodes == 1 ? "" : "s") << "\n";
    return 0;
}

int cmd_replay(const std::string& log_path, const std::string& out_dir, int scale) {
    const EpisodeLog log = read_episode_log(log_path);
    const bool render = !out_dir.empty();
    const ReplayResult result = replay_episode(log, render);
    if (!result.ok) {
        std::cerr << "replay diverged: " << result.error << "\n";
        return 1;
    }
    std::cout << "replay ok: " << log.steps.size() << " steps, returns";
    for (const double r : result.returns) std::cout << ' ' << format_double(r);
    std::cout << "\n";
    if (render) {
        const std::filesystem::path out = resolve_output(out_dir);
        std::filesystem::create_directories(out);
        for (std::size_t i = 0; i < result.frames.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "frame_%04zu.ppm", i);
            write_ppm(out / name, result.frames[i], scale);
        }
        std::cout << "wrote " << result.frames.size() << " frames under " << out.string()
                  << "\n";
    }
    return 0;
}

int cmd_plot(const std::string& csv_path, const std::vector<std::string>& columns,
             const std::string& x_column, const std::string& out_dir, int smooth, int width,
             int height) {
    const MetricsTable table = read_metrics_csv(csv_path);
    const std::vector<std::optional<double>> raw_xs = table.column(x_column);
    std::vector<double> xs;
    xs.reserve(raw_xs.size());
    for (std::size_t i = 0; i < raw_xs.size(); ++i) {
        if (!raw_xs[i])
            throw ArgumentError("x column '" + x_column + "' is empty at row " +
                                std::to_string(i));
        xs.push_back(*raw_xs[i]);
    }
    const std::filesystem::path out = resolve_output(out_dir);
    std::filesystem::create_directories(out);
    for (const std::string& column : columns) {
        if (table.column_index(column) < 0)
            throw ArgumentError("column '" + column + "' not present in " + csv_path);
        PlotSeries series;
        series.label = column;
        series.xs = xs;
        series.values = table.column(column);
        PlotOptions options;
        options.title = column;
        options.x_label = x_column;
        options.y_label = column;
        options.width = width;
        options.height = height;
        options.smooth_window = smooth;
        const std::filesystem::path file = out / (column + ".svg");
        write_line_plot(file, {series}, options);
        std::cout << "wrote " << file.string() << "\n";
    }
    return 0;
}

int cmd_oracle() {
    const std::vector<OracleResult> results = run_fast_oracle_suite();
    int failures = 0;
    for (const OracleResult& result : results) {
        std::cout << (result.passed ? "[PASS] " : "[FAIL] ") << result.name << ": "
                  << result.detail << "\n";
        if (!result.passed) ++failures;
    }
    std::cout << results.size() - failures << "/" << results.size() << " oracles passed\n";
    return failures == 0 ? 0 : 1;
}

int cmd_presets() {
    for (const PresetInfo& info : preset_catalog())
        std::printf("%-28s %s\n", info.name.c_str(), info.summary.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "archipelago: two-timescale multi-agent reinforcement learning on replicated "
        "islands.\nRelative output paths go under $ARCHIPELAGO_OUTPUT_ROOT when it is set."};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    RunFlags run_flags;
    CLI::App* run = app.add_subcommand("run", "Execute an experiment (or resume one)");
    run->add_option("--config", run_flags.config_path, "experiment config JSON file");
    run->add_option("--preset", run_flags.preset_name, "built-in preset name (see `presets`)");
    run->add_option("--out", run_flags.out_dir,
                    "run directory (default runs/<name>-seed<seed>)");
    run->add_option("--seed", run_flags.seed, "master seed override")
        ->each([&run_flags](const std::string&) { run_flags.seed_set = true; });
    run->add_option("--steps", run_flags.steps, "ecological step budget override");
    run->add_option("--scheduler", run_flags.scheduler, "sequential or parallel")
        ->check(CLI::IsMember({"sequential", "parallel"}));
    run->add_flag("--log-episodes", run_flags.log_episodes, "write replayable episode logs");
    run->add_flag("--resume", run_flags.resume,
                  "continue from the newest checkpoint in --out (--steps extends the budget)");

    EvalFlags eval_flags;
    CLI::App* eval = app.add_subcommand("eval", "Play solo episodes with a policy");
    eval->add_option("--config", eval_flags.config_path, "config JSON supplying the game");
    eval->add_option("--preset", eval_flags.preset_name,
                     "preset supplying the game (default clamity-desk)");
    eval->add_option("--policy", eval_flags.policy,
                     "scripted controller: settle-immediately, settle-at-step, seek-nutrient, "
                     "pure-A-forager, pure-B-forager, uniform-random");
    eval->add_option("--settle-step", eval_flags.settle_step,
                     "behavior step for --policy settle-at-step");
    eval->add_option("--run", eval_flags.run_dir, "run directory holding a checkpointed policy");
    eval->add_option("--species", eval_flags.species, "species index (seat and checkpoint)");
    eval->add_option("--island", eval_flags.island, "island identity handed to the game");
    eval->add_option("--episodes", eval_flags.episodes, "episode count");
    eval->add_option("--seed", eval_flags.seed, "evaluation seed");

    std::string replay_log;
    std::string replay_out;
    int replay_scale = 4;
    CLI::App* replay = app.add_subcommand("replay", "Re-simulate an episode log into PPM frames");
    replay->add_option("--log", replay_log, "episode log file")->required();
    replay->add_option("--out", replay_out, "frame directory (omit to verify only)");
    replay->add_option("--scale", replay_scale, "integer pixel upscale");

    std::string plot_csv;
    std::vector<std::string> plot_columns;
    std::string plot_x = "e";
    std::string plot_out = ".";
    int plot_smooth = 1;
    int plot_width = 960;
    int plot_height = 540;
    CLI::App* plot = app.add_subcommand("plot", "Render metrics CSV columns as SVG line plots");
    plot->add_option("--csv", plot_csv, "metrics CSV file")->required();
    plot->add_option("--column", plot_columns, "column to plot (repeatable)")->required();
    plot->add_option("--x", plot_x, "x-axis column");
    plot->add_option("--out", plot_out, "output directory");
    plot->add_option("--smooth", plot_smooth, "trailing moving-average window");
    plot->add_option("--width", plot_width, "SVG width in px");
    plot->add_option("--height", plot_height, "SVG height in px");

    CLI::App* oracle =
        app.add_subcommand("oracle", "Run the quick mathematical oracle suite");
    CLI::App* presets = app.add_subcommand("presets", "List built-in experiment presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 2;
    }

    try {
        if (run->parsed()) return cmd_run(run_flags);
        if (eval->parsed()) return cmd_eval(eval_flags);
        if (replay->parsed()) return cmd_replay(replay_log, replay_out, replay_scale);
        if (plot->parsed())
            return cmd_plot(plot_csv, plot_columns, plot_x, plot_out, plot_smooth, plot_width,
                            plot_height);
        if (oracle->parsed()) return cmd_oracle();
        if (presets->parsed()) return cmd_presets();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
