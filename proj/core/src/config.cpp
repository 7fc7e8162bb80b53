#include "archipelago/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "archipelago/errors.hpp"
#include "archipelago/net.hpp"

namespace archipelago {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
    for (const auto& item : obj.items()) {
        if (!allowed.contains(item.key()))
            fail(path + "." + item.key(), "unknown key (typo?)");
    }
}

const json* find(const json& obj, const std::string& key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

int get_int(const json& obj, const std::string& key, int fallback, const std::string& path) {
    const json* v = find(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer()) fail(path + "." + key, "expected an integer");
    return v->get<int>();
}

long get_long(const json& obj, const std::string& key, long fallback, const std::string& path) {
    const json* v = find(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer()) fail(path + "." + key, "expected an integer");
    return v->get<long>();
}

std::uint64_t get_seed(const json& obj, const std::string& key, std::uint64_t fallback,
                       const std::string& path) {
    const json* v = find(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer() && !v->is_number_unsigned())
        fail(path + "." + key, "expected an integer");
    return v->get<std::uint64_t>();
}

double get_double(const json& obj, const std::string& key, double fallback,
                  const std::string& path) {
    const json* v = find(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) fail(path + "." + key, "expected a number");
    return v->get<double>();
}

bool get_bool(const json& obj, const std::string& key, bool fallback, const std::string& path) {
    const json* v = find(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) fail(path + "." + key, "expected true or false");
    return v->get<bool>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& fallback,
                       const std::string& path) {
    const json* v = find(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) fail(path + "." + key, "expected a string");
    return v->get<std::string>();
}

std::vector<double> get_doubles(const json& obj, const std::string& key,
                                std::vector<double> fallback, const std::string& path) {
    const json* v = find(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_array()) fail(path + "." + key, "expected an array of numbers");
    std::vector<double> out;
    for (const json& e : *v) {
        if (!e.is_number()) fail(path + "." + key, "expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

GridCell parse_cell(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
        fail(path, "expected a [row, col] pair");
    return GridCell{v[0].get<int>(), v[1].get<int>()};
}

json cell_to_json(const GridCell& cell) { return json::array({cell.row, cell.col}); }

Orientation parse_orientation(const std::string& name, const std::string& path) {
    if (name == "north") return Orientation::north;
    if (name == "east") return Orientation::east;
    if (name == "south") return Orientation::south;
    if (name == "west") return Orientation::west;
    fail(path, "unknown orientation '" + name + "'");
}

std::string orientation_name(Orientation o) {
    switch (o) {
        case Orientation::north: return "north";
        case Orientation::east: return "east";
        case Orientation::south: return "south";
        default: return "west";
    }
}

std::vector<GridPlacement> parse_placements(const json& obj, const std::string& key,
                                            const std::string& path) {
    const json* v = find(obj, key);
    if (v == nullptr) return {};
    if (!v->is_array()) fail(path + "." + key, "expected an array of placements");
    std::vector<GridPlacement> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
        const std::string item_path = path + "." + key + "[" + std::to_string(i) + "]";
        const json& e = (*v)[i];
        if (!e.is_object()) fail(item_path, "expected an object");
        check_keys(e, {"cell", "orientation"}, item_path);
        GridPlacement p;
        const json* cell = find(e, "cell");
        if (cell == nullptr) fail(item_path, "missing 'cell'");
        p.cell = parse_cell(*cell, item_path + ".cell");
        p.orientation =
            parse_orientation(get_string(e, "orientation", "north", item_path), item_path);
        out.push_back(p);
    }
    return out;
}

json placements_to_json(const std::vector<GridPlacement>& placements) {
    json out = json::array();
    for (const GridPlacement& p : placements)
        out.push_back(
            {{"cell", cell_to_json(p.cell)}, {"orientation", orientation_name(p.orientation)}});
    return out;
}

ClamityConfig parse_clamity(const json& obj, const std::string& path) {
    check_keys(obj,
               {"name", "map_height", "map_width", "episode_length", "num_nutrient_patches",
                "nutrient_patch_size", "nutrient_min_distance", "max_shell_radius",
                "shell_growth_period", "filter_reward_per_cell_per_step",
                "nutrient_bonus_per_step", "spawn_region", "nutrient_patch_origins",
                "fixed_spawns"},
               path);
    ClamityConfig c;
    c.map_height = get_int(obj, "map_height", c.map_height, path);
    c.map_width = get_int(obj, "map_width", c.map_width, path);
    c.episode_length = get_int(obj, "episode_length", c.episode_length, path);
    c.num_nutrient_patches = get_int(obj, "num_nutrient_patches", c.num_nutrient_patches, path);
    c.nutrient_patch_size = get_int(obj, "nutrient_patch_size", c.nutrient_patch_size, path);
    c.nutrient_min_distance =
        get_int(obj, "nutrient_min_distance", c.nutrient_min_distance, path);
    c.max_shell_radius = get_int(obj, "max_shell_radius", c.max_shell_radius, path);
    c.shell_growth_period = get_int(obj, "shell_growth_period", c.shell_growth_period, path);
    c.filter_reward_per_cell_per_step = get_double(obj, "filter_reward_per_cell_per_step",
                                                   c.filter_reward_per_cell_per_step, path);
    c.nutrient_bonus_per_step =
        get_double(obj, "nutrient_bonus_per_step", c.nutrient_bonus_per_step, path);
    c.spawn_region = get_int(obj, "spawn_region", c.spawn_region, path);
    if (const json* v = find(obj, "nutrient_patch_origins")) {
        if (!v->is_array()) fail(path + ".nutrient_patch_origins", "expected an array");
        for (std::size_t i = 0; i < v->size(); ++i)
            c.nutrient_patch_origins.push_back(parse_cell(
                (*v)[i], path + ".nutrient_patch_origins[" + std::to_string(i) + "]"));
    }
    c.fixed_spawns = parse_placements(obj, "fixed_spawns", path);
    return c;
}

json clamity_to_json(const ClamityConfig& c) {
    json origins = json::array();
    for (const GridCell& cell : c.nutrient_patch_origins) origins.push_back(cell_to_json(cell));
    return json{{"name", "clamity"},
                {"map_height", c.map_height},
                {"map_width", c.map_width},
                {"episode_length", c.episode_length},
                {"num_nutrient_patches", c.num_nutrient_patches},
                {"nutrient_patch_size", c.nutrient_patch_size},
                {"nutrient_min_distance", c.nutrient_min_distance},
                {"max_shell_radius", c.max_shell_radius},
                {"shell_growth_period", c.shell_growth_period},
                {"filter_reward_per_cell_per_step", c.filter_reward_per_cell_per_step},
                {"nutrient_bonus_per_step", c.nutrient_bonus_per_step},
                {"spawn_region", c.spawn_region},
                {"nutrient_patch_origins", origins},
                {"fixed_spawns", placements_to_json(c.fixed_spawns)}};
}

AllelopathyConfig parse_allelopathy(const json& obj, const std::string& path) {
    check_keys(obj,
               {"name", "map_height", "map_width", "episode_length", "num_shrub_types",
                "streak_caps", "type_frequencies", "initial_density",
                "base_regrowth_probability", "suppression_radius", "fixed_shrubs",
                "fixed_spawns"},
               path);
    AllelopathyConfig c;
    c.map_height = get_int(obj, "map_height", c.map_height, path);
    c.map_width = get_int(obj, "map_width", c.map_width, path);
    c.episode_length = get_int(obj, "episode_length", c.episode_length, path);
    c.num_shrub_types = get_int(obj, "num_shrub_types", c.num_shrub_types, path);
    c.streak_caps = get_doubles(obj, "streak_caps", c.streak_caps, path);
    c.type_frequencies = get_doubles(obj, "type_frequencies", c.type_frequencies, path);
    c.initial_density = get_double(obj, "initial_density", c.initial_density, path);
    c.base_regrowth_probability =
        get_double(obj, "base_regrowth_probability", c.base_regrowth_probability, path);
    c.suppression_radius = get_int(obj, "suppression_radius", c.suppression_radius, path);
    if (const json* v = find(obj, "fixed_shrubs")) {
        if (!v->is_array()) fail(path + ".fixed_shrubs", "expected an array");
        for (std::size_t i = 0; i < v->size(); ++i) {
            const std::string item_path = path + ".fixed_shrubs[" + std::to_string(i) + "]";
            const json& e = (*v)[i];
            if (!e.is_object()) fail(item_path, "expected an object");
            check_keys(e, {"cell", "type", "grown"}, item_path);
            ShrubPlacement p;
            const json* cell = find(e, "cell");
            if (cell == nullptr) fail(item_path, "missing 'cell'");
            p.cell = parse_cell(*cell, item_path + ".cell");
            p.type = get_int(e, "type", 0, item_path);
            p.grown = get_bool(e, "grown", true, item_path);
            c.fixed_shrubs.push_back(p);
        }
    }
    c.fixed_spawns = parse_placements(obj, "fixed_spawns", path);
    return c;
}

json allelopathy_to_json(const AllelopathyConfig& c) {
    json shrubs = json::array();
    for (const ShrubPlacement& p : c.fixed_shrubs)
        shrubs.push_back(
            {{"cell", cell_to_json(p.cell)}, {"type", p.type}, {"grown", p.grown}});
    return json{{"name", "allelopathy"},
                {"map_height", c.map_height},
                {"map_width", c.map_width},
                {"episode_length", c.episode_length},
                {"num_shrub_types", c.num_shrub_types},
                {"streak_caps", c.streak_caps},
                {"type_frequencies", c.type_frequencies},
                {"initial_density", c.initial_density},
                {"base_regrowth_probability", c.base_regrowth_probability},
                {"suppression_radius", c.suppression_radius},
                {"fixed_shrubs", shrubs},
                {"fixed_spawns", placements_to_json(c.fixed_spawns)}};
}

BanditConfig parse_bandit(const json& obj, const std::string& path) {
    check_keys(obj, {"name", "episode_length", "num_actions", "island_rewards", "arm_rewards"},
               path);
    BanditConfig c;
    c.episode_length = get_int(obj, "episode_length", c.episode_length, path);
    c.num_actions = get_int(obj, "num_actions", c.num_actions, path);
    c.island_rewards = get_doubles(obj, "island_rewards", c.island_rewards, path);
    c.arm_rewards = get_doubles(obj, "arm_rewards", c.arm_rewards, path);
    return c;
}

json bandit_to_json(const BanditConfig& c) {
    return json{{"name", "bandit"},
                {"episode_length", c.episode_length},
                {"num_actions", c.num_actions},
                {"island_rewards", c.island_rewards},
                {"arm_rewards", c.arm_rewards}};
}

GameConfig parse_game(const json& obj, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    const std::string name = get_string(obj, "name", "", path);
    if (name.empty()) fail(path + ".name", "required");
    if (name == "clamity") return parse_clamity(obj, path);
    if (name == "allelopathy") return parse_allelopathy(obj, path);
    if (name == "bandit") return parse_bandit(obj, path);
    fail(path + ".name", "unknown game '" + name + "'");
}

json game_to_json(const GameConfig& game) {
    if (const auto* c = std::get_if<ClamityConfig>(&game)) return clamity_to_json(*c);
    if (const auto* c = std::get_if<AllelopathyConfig>(&game)) return allelopathy_to_json(*c);
    return bandit_to_json(std::get<BanditConfig>(game));
}

ProtocolMode parse_mode(const std::string& name, const std::string& path) {
    if (name == "malthusian") return ProtocolMode::malthusian;
    if (name == "fixed-population") return ProtocolMode::fixed_population;
    if (name == "single-agent") return ProtocolMode::single_agent;
    fail(path, "unknown protocol mode '" + name + "'");
}

SchedulerKind parse_scheduler(const std::string& name, const std::string& path) {
    if (name == "sequential") return SchedulerKind::sequential;
    if (name == "parallel") return SchedulerKind::parallel;
    fail(path, "unknown scheduler '" + name + "'");
}

ExperimentConfig parse_config_json(const json& root) {
    if (!root.is_object()) throw ConfigError("config: top level must be a JSON object");
    check_keys(root, {"name", "game", "protocol", "population", "learner", "run"}, "config");

    ExperimentConfig cfg;
    cfg.name = get_string(root, "name", "", "config");
    if (cfg.name.empty()) fail("config.name", "required");

    const json* game = find(root, "game");
    if (game == nullptr) fail("config.game", "required");
    cfg.game = parse_game(*game, "config.game");

    if (const json* p = find(root, "protocol")) {
        const std::string path = "config.protocol";
        if (!p->is_object()) fail(path, "expected an object");
        check_keys(*p,
                   {"mode", "num_islands", "num_species", "individuals_per_species",
                    "fixed_population_size", "solitary_islands", "single_agent_replicas"},
                   path);
        cfg.protocol.mode =
            parse_mode(get_string(*p, "mode", "malthusian", path), path + ".mode");
        cfg.protocol.num_islands = get_int(*p, "num_islands", cfg.protocol.num_islands, path);
        cfg.protocol.num_species = get_int(*p, "num_species", cfg.protocol.num_species, path);
        cfg.protocol.individuals_per_species =
            get_int(*p, "individuals_per_species", cfg.protocol.individuals_per_species, path);
        cfg.protocol.fixed_population_size =
            get_int(*p, "fixed_population_size", cfg.protocol.fixed_population_size, path);
        cfg.protocol.solitary_islands =
            get_bool(*p, "solitary_islands", cfg.protocol.solitary_islands, path);
        cfg.protocol.single_agent_replicas =
            get_int(*p, "single_agent_replicas", cfg.protocol.single_agent_replicas, path);
    }

    if (const json* p = find(root, "population")) {
        const std::string path = "config.population";
        if (!p->is_object()) fail(path, "expected an object");
        check_keys(*p, {"adaptation_rate", "entropy_weight"}, path);
        cfg.population.adaptation_rate =
            get_double(*p, "adaptation_rate", cfg.population.adaptation_rate, path);
        cfg.population.entropy_weight =
            get_double(*p, "entropy_weight", cfg.population.entropy_weight, path);
    }
    cfg.population.num_species = cfg.protocol.num_species;
    cfg.population.individuals_per_species = cfg.protocol.individuals_per_species;

    if (const json* p = find(root, "learner")) {
        const std::string path = "config.learner";
        if (!p->is_object()) fail(path, "expected an object");
        check_keys(*p,
                   {"profile", "learning_rate", "entropy_cost", "discount", "baseline_cost",
                    "rmsprop_decay", "rmsprop_epsilon", "batch_size", "unroll_length"},
                   path);
        cfg.learner_profile = get_string(*p, "profile", cfg.learner_profile, path);
        cfg.learner.learning_rate =
            get_double(*p, "learning_rate", cfg.learner.learning_rate, path);
        cfg.learner.entropy_cost = get_double(*p, "entropy_cost", cfg.learner.entropy_cost, path);
        cfg.learner.discount = get_double(*p, "discount", cfg.learner.discount, path);
        cfg.learner.baseline_cost =
            get_double(*p, "baseline_cost", cfg.learner.baseline_cost, path);
        cfg.learner.rmsprop_decay =
            get_double(*p, "rmsprop_decay", cfg.learner.rmsprop_decay, path);
        cfg.learner.rmsprop_epsilon =
            get_double(*p, "rmsprop_epsilon", cfg.learner.rmsprop_epsilon, path);
        cfg.learner.batch_size = get_int(*p, "batch_size", cfg.learner.batch_size, path);
        cfg.learner.unroll_length = get_int(*p, "unroll_length", cfg.learner.unroll_length, path);
    }

    if (const json* p = find(root, "run")) {
        const std::string path = "config.run";
        if (!p->is_object()) fail(path, "expected an object");
        check_keys(*p,
                   {"ecological_steps", "master_seed", "scheduler", "checkpoint_interval",
                    "queue_capacity", "log_episodes", "parallel_workers"},
                   path);
        cfg.run.ecological_steps =
            get_long(*p, "ecological_steps", cfg.run.ecological_steps, path);
        cfg.run.master_seed = get_seed(*p, "master_seed", cfg.run.master_seed, path);
        cfg.run.scheduler = parse_scheduler(get_string(*p, "scheduler", "sequential", path),
                                            path + ".scheduler");
        cfg.run.checkpoint_interval =
            get_long(*p, "checkpoint_interval", cfg.run.checkpoint_interval, path);
        cfg.run.queue_capacity = get_int(*p, "queue_capacity", cfg.run.queue_capacity, path);
        cfg.run.log_episodes = get_bool(*p, "log_episodes", cfg.run.log_episodes, path);
        cfg.run.parallel_workers =
            get_int(*p, "parallel_workers", cfg.run.parallel_workers, path);
    }

    validate_config(cfg);
    return cfg;
}

}  // namespace

std::string to_string(ProtocolMode mode) {
    switch (mode) {
        case ProtocolMode::malthusian: return "malthusian";
        case ProtocolMode::fixed_population: return "fixed-population";
        default: return "single-agent";
    }
}

std::string to_string(SchedulerKind kind) {
    return kind == SchedulerKind::sequential ? "sequential" : "parallel";
}

ExperimentConfig parse_config_string(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return parse_config_json(root);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_string(buffer.str());
}

std::string config_to_json_string(const ExperimentConfig& cfg) {
    const json root{
        {"name", cfg.name},
        {"game", game_to_json(cfg.game)},
        {"protocol",
         {{"mode", to_string(cfg.protocol.mode)},
          {"num_islands", cfg.protocol.num_islands},
          {"num_species", cfg.protocol.num_species},
          {"individuals_per_species", cfg.protocol.individuals_per_species},
          {"fixed_population_size", cfg.protocol.fixed_population_size},
          {"solitary_islands", cfg.protocol.solitary_islands},
          {"single_agent_replicas", cfg.protocol.single_agent_replicas}}},
        {"population",
         {{"adaptation_rate", cfg.population.adaptation_rate},
          {"entropy_weight", cfg.population.entropy_weight}}},
        {"learner",
         {{"profile", cfg.learner_profile},
          {"learning_rate", cfg.learner.learning_rate},
          {"entropy_cost", cfg.learner.entropy_cost},
          {"discount", cfg.learner.discount},
          {"baseline_cost", cfg.learner.baseline_cost},
          {"rmsprop_decay", cfg.learner.rmsprop_decay},
          {"rmsprop_epsilon", cfg.learner.rmsprop_epsilon},
          {"batch_size", cfg.learner.batch_size},
          {"unroll_length", cfg.learner.unroll_length}}},
        {"run",
         {{"ecological_steps", cfg.run.ecological_steps},
          {"master_seed", cfg.run.master_seed},
          {"scheduler", to_string(cfg.run.scheduler)},
          {"checkpoint_interval", cfg.run.checkpoint_interval},
          {"queue_capacity", cfg.run.queue_capacity},
          {"log_episodes", cfg.run.log_episodes},
          {"parallel_workers", cfg.run.parallel_workers}}}};
    return root.dump(2) + "\n";
}

std::string game_config_to_json_string(const GameConfig& game) {
    return game_to_json(game).dump();
}

GameConfig parse_game_config_string(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("game config: invalid JSON: ") + e.what());
    }
    return parse_game(root, "game");
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.name.empty()) fail("config.name", "required");
    const ExperimentProtocol& p = cfg.protocol;
    if (p.num_species < 1) fail("config.protocol.num_species", "must be at least 1");
    if (p.individuals_per_species < 1)
        fail("config.protocol.individuals_per_species", "must be at least 1");
    switch (p.mode) {
        case ProtocolMode::malthusian:
            if (p.num_islands < 1)
                fail("config.protocol.num_islands", "malthusian mode needs at least 1 island");
            break;
        case ProtocolMode::fixed_population:
            if (p.num_islands < 1)
                fail("config.protocol.num_islands",
                     "fixed-population mode needs at least 1 island");
            if (p.fixed_population_size < 1)
                fail("config.protocol.fixed_population_size", "must be at least 1");
            if (p.individuals_per_species != p.num_islands * p.fixed_population_size)
                fail("config.protocol.individuals_per_species",
                     "fixed-population mode requires individuals_per_species = num_islands * "
                     "fixed_population_size (" +
                         std::to_string(p.num_islands * p.fixed_population_size) + ")");
            break;
        case ProtocolMode::single_agent:
            if (p.num_islands != 0)
                fail("config.protocol.num_islands", "single-agent mode requires 0 islands");
            if (p.single_agent_replicas < 1)
                fail("config.protocol.single_agent_replicas", "must be at least 1");
            if (!p.solitary_islands)
                fail("config.protocol.solitary_islands",
                     "single-agent mode runs entirely on solitary islands; set it to true");
            break;
    }
    if (cfg.population.num_species != p.num_species ||
        cfg.population.individuals_per_species != p.individuals_per_species)
        fail("config.population", "species counts must mirror the protocol section");
    if (cfg.population.adaptation_rate < 0.0)
        fail("config.population.adaptation_rate", "must be non-negative");
    if (cfg.population.entropy_weight < 0.0)
        fail("config.population.entropy_weight", "must be non-negative");

    if (cfg.learner_profile != "paper" && cfg.learner_profile != "desk" &&
        cfg.learner_profile != "tiny")
        fail("config.learner.profile", "must be one of paper, desk, tiny");
    const LearnerConfig& l = cfg.learner;
    if (l.learning_rate <= 0.0) fail("config.learner.learning_rate", "must be positive");
    if (l.entropy_cost < 0.0) fail("config.learner.entropy_cost", "must be non-negative");
    if (l.discount < 0.0 || l.discount >= 1.0)
        fail("config.learner.discount", "must lie in [0, 1)");
    if (l.baseline_cost < 0.0) fail("config.learner.baseline_cost", "must be non-negative");
    if (l.rmsprop_decay <= 0.0 || l.rmsprop_decay >= 1.0)
        fail("config.learner.rmsprop_decay", "must lie in (0, 1)");
    if (l.rmsprop_epsilon <= 0.0) fail("config.learner.rmsprop_epsilon", "must be positive");
    if (l.batch_size < 1) fail("config.learner.batch_size", "must be at least 1");
    if (l.unroll_length < 1) fail("config.learner.unroll_length", "must be at least 1");

    const RunConfig& r = cfg.run;
    if (r.ecological_steps < 0) fail("config.run.ecological_steps", "must be non-negative");
    if (r.checkpoint_interval < 0) fail("config.run.checkpoint_interval", "must be non-negative");
    if (r.queue_capacity < l.batch_size)
        fail("config.run.queue_capacity",
             "must be at least batch_size or updates could never fire");
    if (r.parallel_workers < 1) fail("config.run.parallel_workers", "must be at least 1");

    if (const auto* bandit = std::get_if<BanditConfig>(&cfg.game)) {
        if (static_cast<int>(bandit->island_rewards.size()) < p.num_islands)
            fail("config.game.island_rewards", "must cover every archipelago island");
    }
    try {
        (void)make_environment(cfg.game, 0);
    } catch (const std::exception& e) {
        fail("config.game", e.what());
    }
}

namespace {

ExperimentConfig base_config(const std::string& name, GameConfig game) {
    ExperimentConfig cfg;
    cfg.name = name;
    cfg.game = std::move(game);
    return cfg;
}

void set_population(ExperimentConfig& cfg, int num_species, int individuals_per_species,
                    double adaptation_rate, double entropy_weight) {
    cfg.protocol.num_species = num_species;
    cfg.protocol.individuals_per_species = individuals_per_species;
    cfg.population.num_species = num_species;
    cfg.population.individuals_per_species = individuals_per_species;
    cfg.population.adaptation_rate = adaptation_rate;
    cfg.population.entropy_weight = entropy_weight;
}

/// 12x24 map whose nutrient patches sit at least 6 moves outside the spawn
/// square: the smallest world where immediate settling is a local optimum
/// and patch-seeking is discoverable in hours.
ClamityConfig desk_explore_map() {
    ClamityConfig game;
    game.map_height = 12;
    game.map_width = 24;
    game.spawn_region = 6;
    game.nutrient_min_distance = 6;
    game.nutrient_patch_origins = {GridCell{2, 3}, GridCell{8, 19}, GridCell{2, 19},
                                   GridCell{8, 3}};
    return game;
}

ExperimentConfig make_preset(const std::string& name) {
    if (name == "bandit-smoke") {
        BanditConfig game;
        game.episode_length = 5;
        game.num_actions = 2;
        game.island_rewards = {1.0, 0.0, 0.0, 0.0};
        ExperimentConfig cfg = base_config(name, game);
        cfg.protocol.num_islands = 4;
        set_population(cfg, 1, 16, 0.1, 0.05);
        cfg.learner_profile = "tiny";
        cfg.learner.unroll_length = 5;
        cfg.run.ecological_steps = 500;
        return cfg;
    }
    if (name == "clamity-desk") {
        ExperimentConfig cfg = base_config(name, ClamityConfig{});
        cfg.protocol.num_islands = 4;
        cfg.protocol.solitary_islands = true;
        set_population(cfg, 1, 16, 0.001, 1.5);
        cfg.run.ecological_steps = 500;
        cfg.run.checkpoint_interval = 100;
        return cfg;
    }
    if (name == "clamity-desk-explore") {
        ExperimentConfig cfg = base_config(name, desk_explore_map());
        cfg.protocol.num_islands = 8;
        cfg.protocol.solitary_islands = true;
        set_population(cfg, 1, 32, 0.001, 1.5);
        cfg.run.ecological_steps = 20000;
        cfg.run.checkpoint_interval = 2000;
        return cfg;
    }
    if (name == "clamity-single-agent") {
        ExperimentConfig cfg = base_config(name, desk_explore_map());
        cfg.protocol.mode = ProtocolMode::single_agent;
        cfg.protocol.num_islands = 0;
        cfg.protocol.solitary_islands = true;
        cfg.protocol.single_agent_replicas = 32;
        set_population(cfg, 1, 1, 0.0, 1.5);
        cfg.run.ecological_steps = 20000;
        cfg.run.checkpoint_interval = 2000;
        return cfg;
    }
    if (name == "clamity-malthusian-paper") {
        ExperimentConfig cfg = base_config(name, ClamityConfig{});
        // The spawn square must be able to hold any sampled allocation; a
        // 31x31 square (961 cells) fits all 960 individuals at once.
        std::get<ClamityConfig>(cfg.game).spawn_region = 31;
        cfg.protocol.num_islands = 60;
        cfg.protocol.solitary_islands = true;
        set_population(cfg, 1, 960, 0.0001, 1.5);
        cfg.learner_profile = "paper";
        cfg.run.ecological_steps = 100000;
        cfg.run.checkpoint_interval = 1000;
        return cfg;
    }
    if (name == "allelopathy-unbiased-paper" || name == "allelopathy-biased-paper") {
        AllelopathyConfig game;
        ExperimentConfig cfg = base_config(name, game);
        cfg.protocol.num_islands = 60;
        cfg.protocol.solitary_islands = true;
        if (name == "allelopathy-biased-paper") {
            std::get<AllelopathyConfig>(cfg.game).streak_caps = {8.0, 250.0};
            std::get<AllelopathyConfig>(cfg.game).type_frequencies = {0.8, 0.2};
            set_population(cfg, 4, 240, 0.0001, 0.01);
        } else {
            set_population(cfg, 4, 240, 1e-7, 0.3);
        }
        cfg.learner_profile = "paper";
        cfg.run.ecological_steps = 100000;
        cfg.run.checkpoint_interval = 1000;
        return cfg;
    }
    if (name == "allelopathy-fixed-paper") {
        ExperimentConfig cfg = base_config(name, AllelopathyConfig{});
        cfg.protocol.mode = ProtocolMode::fixed_population;
        cfg.protocol.num_islands = 30;
        cfg.protocol.fixed_population_size = 8;
        cfg.protocol.solitary_islands = true;
        set_population(cfg, 4, 240, 0.0, 0.3);
        cfg.learner_profile = "paper";
        cfg.run.ecological_steps = 100000;
        cfg.run.checkpoint_interval = 1000;
        return cfg;
    }
    if (name == "allelopathy-desk") {
        ExperimentConfig cfg = base_config(name, AllelopathyConfig{});
        cfg.protocol.num_islands = 4;
        cfg.protocol.solitary_islands = true;
        set_population(cfg, 2, 8, 0.001, 0.3);
        cfg.run.ecological_steps = 200;
        cfg.run.checkpoint_interval = 50;
        return cfg;
    }
    throw ArgumentError("unknown preset '" + name + "'");
}

}  // namespace

std::vector<PresetInfo> preset_catalog() {
    return {
        {"bandit-smoke",
         "4-island constant-reward bandit; migration concentrates on the paying island"},
        {"clamity-desk", "small Clamity archipelago, desk network, minutes to run"},
        {"clamity-desk-explore",
         "12x24 Clamity with distant nutrient, solitary eval; hours (long-running)"},
        {"clamity-single-agent",
         "32 replicated solitary Clamity islands, no archipelago; hours (long-running)"},
        {"clamity-malthusian-paper",
         "published scale: 60 islands, 960 individuals, alpha=0.0001, eta=1.5 (long-running)"},
        {"allelopathy-unbiased-paper",
         "published scale: 4 species, equal caps 250/250, alpha=1e-7, eta=0.3 (long-running)"},
        {"allelopathy-biased-paper",
         "published scale: biased caps 8/250, 80/20 shrub mix, alpha=0.0001, eta=0.01 "
         "(long-running)"},
        {"allelopathy-fixed-paper",
         "published scale, fixed population 8 per species on 30 islands (long-running)"},
        {"allelopathy-desk", "two scripted-scale species on 4 islands, desk network, minutes"},
    };
}

bool is_preset(const std::string& name) {
    for (const PresetInfo& info : preset_catalog())
        if (info.name == name) return true;
    return false;
}

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig cfg = make_preset(name);
    validate_config(cfg);
    return cfg;
}

}  // namespace archipelago
