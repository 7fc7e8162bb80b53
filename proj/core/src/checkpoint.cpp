#include "archipelago/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "archipelago/errors.hpp"
#include "archipelago/image.hpp"

namespace archipelago {

namespace {

constexpr std::uint32_t kSpeciesMagic = 0x41535031;  // "ASP1"
constexpr std::uint32_t kEcologyMagic = 0x41454331;  // "AEC1"

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

/// Little-endian fixed-width binary stream. All multi-byte values go
/// through these helpers so files are portable across hosts.
class BinaryWriter {
public:
    explicit BinaryWriter(const std::filesystem::path& path)
        : path_(path), file_(std::fopen((path.string() + ".tmp").c_str(), "wb")) {
        if (file_ == nullptr)
            throw StateError("cannot create checkpoint file " + path.string());
    }
    ~BinaryWriter() {
        if (file_ != nullptr) std::fclose(file_);
    }

    void u32(std::uint32_t v) { raw_uint(v, 4); }
    void u64(std::uint64_t v) { raw_uint(v, 8); }
    void i64(std::int64_t v) { raw_uint(static_cast<std::uint64_t>(v), 8); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        u64(bits);
    }
    void bytes(const std::uint8_t* data, std::size_t n) {
        if (std::fwrite(data, 1, n, file_) != n)
            throw StateError("short write to " + path_.string());
    }
    void vec(const Eigen::VectorXd& v) {
        u64(static_cast<std::uint64_t>(v.size()));
        for (Eigen::Index i = 0; i < v.size(); ++i) f64(v[i]);
    }
    void doubles(const std::vector<double>& v) {
        u64(v.size());
        for (const double x : v) f64(x);
    }

    /// Publishes the file: flush, close, rename over the final name.
    void commit() {
        if (std::fflush(file_) != 0 || std::fclose(file_) != 0) {
            file_ = nullptr;
            throw StateError("cannot finish checkpoint file " + path_.string());
        }
        file_ = nullptr;
        std::filesystem::rename(path_.string() + ".tmp", path_);
    }

private:
    void raw_uint(std::uint64_t v, int width) {
        std::uint8_t buf[8];
        for (int i = 0; i < width; ++i) buf[i] = static_cast<std::uint8_t>(v >> (8 * i));
        bytes(buf, static_cast<std::size_t>(width));
    }

    std::filesystem::path path_;
    std::FILE* file_;
};

class BinaryReader {
public:
    explicit BinaryReader(const std::filesystem::path& path)
        : path_(path), file_(std::fopen(path.string().c_str(), "rb")) {
        if (file_ == nullptr)
            throw DataIntegrityError("missing checkpoint file " + path.string());
    }
    ~BinaryReader() {
        if (file_ != nullptr) std::fclose(file_);
    }

    std::uint32_t u32() { return static_cast<std::uint32_t>(raw_uint(4)); }
    std::uint64_t u64() { return raw_uint(8); }
    std::int64_t i64() { return static_cast<std::int64_t>(raw_uint(8)); }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }
    void bytes(std::uint8_t* out, std::size_t n) {
        if (std::fread(out, 1, n, file_) != n)
            throw DataIntegrityError("truncated checkpoint file " + path_.string());
    }
    Eigen::VectorXd vec() {
        const std::uint64_t n = length();
        Eigen::VectorXd v(static_cast<Eigen::Index>(n));
        for (std::uint64_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = f64();
        return v;
    }
    std::vector<double> doubles() {
        const std::uint64_t n = length();
        std::vector<double> v(n);
        for (std::uint64_t i = 0; i < n; ++i) v[i] = f64();
        return v;
    }
    std::uint64_t length() {
        const std::uint64_t n = u64();
        if (n > (1ULL << 32))
            throw DataIntegrityError("implausible length in " + path_.string());
        return n;
    }
    void expect_end() {
        std::uint8_t probe;
        if (std::fread(&probe, 1, 1, file_) != 0)
            throw DataIntegrityError("trailing bytes in checkpoint file " + path_.string());
    }

private:
    std::uint64_t raw_uint(int width) {
        std::uint8_t buf[8];
        bytes(buf, static_cast<std::size_t>(width));
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
        return v;
    }

    std::filesystem::path path_;
    std::FILE* file_;
};

void write_image(BinaryWriter& out, const Image& image) {
    out.u32(static_cast<std::uint32_t>(image.height()));
    out.u32(static_cast<std::uint32_t>(image.width()));
    out.bytes(image.data().data(), image.data().size());
}

Image read_image(BinaryReader& in) {
    const int height = static_cast<int>(in.u32());
    const int width = static_cast<int>(in.u32());
    if (height < 0 || width < 0 || height > 4096 || width > 4096)
        throw DataIntegrityError("implausible image size in checkpoint");
    Image image(height, width);
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(height) * width * 3);
    in.bytes(raw.data(), raw.size());
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) {
            const std::size_t base = (static_cast<std::size_t>(r) * width + c) * 3;
            image.set(r, c, Rgb{raw[base], raw[base + 1], raw[base + 2]});
        }
    return image;
}

void write_trajectory(BinaryWriter& out, const Trajectory& t) {
    out.u32(static_cast<std::uint32_t>(t.species_id));
    out.u32(static_cast<std::uint32_t>(t.island_id));
    out.u64(t.observations.size());
    for (const Image& image : t.observations) write_image(out, image);
    out.doubles(t.last_rewards);
    out.u64(t.actions.size());
    for (const int a : t.actions) out.u32(static_cast<std::uint32_t>(a));
    out.doubles(t.behavior_logp);
    out.doubles(t.rewards);
    out.vec(t.initial_state.h);
    out.vec(t.initial_state.c);
    out.f64(t.bootstrap_value);
}

Trajectory read_trajectory(BinaryReader& in) {
    Trajectory t;
    t.species_id = static_cast<int>(in.u32());
    t.island_id = static_cast<int>(in.u32());
    const std::uint64_t frames = in.length();
    t.observations.reserve(frames);
    for (std::uint64_t i = 0; i < frames; ++i) t.observations.push_back(read_image(in));
    t.last_rewards = in.doubles();
    const std::uint64_t actions = in.length();
    t.actions.reserve(actions);
    for (std::uint64_t i = 0; i < actions; ++i) t.actions.push_back(static_cast<int>(in.u32()));
    t.behavior_logp = in.doubles();
    t.rewards = in.doubles();
    t.initial_state.h = in.vec();
    t.initial_state.c = in.vec();
    t.bootstrap_value = in.f64();
    return t;
}

}  // namespace

std::uint64_t experiment_spec_hash(const ExperimentConfig& config) {
    const ExperimentProtocol& p = config.protocol;
    std::string text = game_config_to_json_string(config.game);
    text += '|';
    text += to_string(p.mode);
    text += '|';
    text += config.learner_profile;
    std::uint64_t hash = fnv1a64(text);
    hash = mix64(hash ^ static_cast<std::uint64_t>(p.num_islands));
    hash = mix64(hash ^ static_cast<std::uint64_t>(p.num_species));
    hash = mix64(hash ^ static_cast<std::uint64_t>(p.individuals_per_species));
    hash = mix64(hash ^ static_cast<std::uint64_t>(p.fixed_population_size));
    hash = mix64(hash ^ static_cast<std::uint64_t>(p.solitary_islands ? 1 : 0));
    hash = mix64(hash ^
                 static_cast<std::uint64_t>(p.mode == ProtocolMode::single_agent
                                                ? p.single_agent_replicas
                                                : 0));
    hash = mix64(hash ^ static_cast<std::uint64_t>(config.learner.batch_size));
    hash = mix64(hash ^ static_cast<std::uint64_t>(config.learner.unroll_length));
    return hash;
}

std::filesystem::path checkpoint_dir(const std::filesystem::path& run_dir, long ecological_step) {
    return run_dir / "checkpoints" / ("step_" + std::to_string(ecological_step));
}

void write_checkpoint(const std::filesystem::path& dir, const CheckpointData& data) {
    const std::size_t num_species = data.species.size();
    if (data.distributions.size() != num_species ||
        data.queue_segments.size() != num_species)
        throw ArgumentError("checkpoint sections disagree on the species count");
    std::filesystem::create_directories(dir);

    for (std::size_t l = 0; l < num_species; ++l) {
        BinaryWriter out(dir / ("species_" + std::to_string(l) + ".bin"));
        out.u32(kSpeciesMagic);
        out.u64(data.spec_hash);
        out.u32(static_cast<std::uint32_t>(l));
        out.i64(data.species[l].update_count);
        out.vec(data.species[l].params);
        out.vec(data.species[l].rms);
        out.commit();
    }

    {
        BinaryWriter out(dir / "ecology.bin");
        out.u32(kEcologyMagic);
        out.u64(data.spec_hash);
        out.i64(data.ecological_step);
        out.u64(data.master_seed);
        out.u32(static_cast<std::uint32_t>(num_species));
        for (std::size_t l = 0; l < num_species; ++l) {
            out.u32(static_cast<std::uint32_t>(data.distributions[l].species_id));
            out.doubles(data.distributions[l].weights);
            out.u64(data.queue_segments[l].size());
            for (const Trajectory& t : data.queue_segments[l]) write_trajectory(out, t);
        }
        out.commit();
    }

    const nlohmann::json manifest{{"format", "archipelago-checkpoint"},
                                  {"version", 1},
                                  {"ecological_step", data.ecological_step},
                                  {"master_seed", data.master_seed},
                                  {"num_species", num_species},
                                  {"spec_hash", data.spec_hash}};
    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    out << manifest.dump(2) << "\n";
    if (!out) throw StateError("cannot write checkpoint manifest in " + dir.string());
}

CheckpointData read_checkpoint(const std::filesystem::path& dir,
                               std::uint64_t expected_spec_hash) {
    std::ifstream manifest_in(dir / "manifest.json");
    if (!manifest_in)
        throw DataIntegrityError("missing checkpoint manifest in " + dir.string());
    nlohmann::json manifest;
    try {
        manifest_in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw DataIntegrityError("unreadable checkpoint manifest: " + std::string(e.what()));
    }
    if (manifest.value("format", "") != "archipelago-checkpoint")
        throw DataIntegrityError("not a checkpoint manifest: " + dir.string());

    CheckpointData data;
    {
        BinaryReader in(dir / "ecology.bin");
        if (in.u32() != kEcologyMagic)
            throw DataIntegrityError("bad magic in ecology.bin");
        data.spec_hash = in.u64();
        if (data.spec_hash != expected_spec_hash)
            throw DataIntegrityError(
                "checkpoint was written by a different experiment setup (spec hash mismatch)");
        data.ecological_step = static_cast<long>(in.i64());
        data.master_seed = in.u64();
        const std::uint32_t num_species = in.u32();
        if (num_species > 4096) throw DataIntegrityError("implausible species count");
        for (std::uint32_t l = 0; l < num_species; ++l) {
            SpeciesDistribution dist;
            dist.species_id = static_cast<int>(in.u32());
            dist.weights = in.doubles();
            data.distributions.push_back(std::move(dist));
            const std::uint64_t segments = in.length();
            std::vector<Trajectory> queue;
            queue.reserve(segments);
            for (std::uint64_t s = 0; s < segments; ++s) queue.push_back(read_trajectory(in));
            data.queue_segments.push_back(std::move(queue));
        }
        in.expect_end();
    }

    for (std::size_t l = 0; l < data.distributions.size(); ++l) {
        BinaryReader in(dir / ("species_" + std::to_string(l) + ".bin"));
        if (in.u32() != kSpeciesMagic)
            throw DataIntegrityError("bad magic in species file " + std::to_string(l));
        if (in.u64() != expected_spec_hash)
            throw DataIntegrityError(
                "species file was written by a different experiment setup (spec hash mismatch)");
        if (in.u32() != l) throw DataIntegrityError("species file index mismatch");
        SpeciesCheckpoint species;
        species.update_count = in.i64();
        species.params = in.vec();
        species.rms = in.vec();
        in.expect_end();
        data.species.push_back(std::move(species));
    }
    return data;
}

std::optional<long> latest_checkpoint_step(const std::filesystem::path& run_dir) {
    const std::filesystem::path root = run_dir / "checkpoints";
    if (!std::filesystem::is_directory(root)) return std::nullopt;
    std::optional<long> best;
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        const std::string name = entry.path().filename().string();
        if (!entry.is_directory() || name.rfind("step_", 0) != 0) continue;
        try {
            const long step = std::stol(name.substr(5));
            if (!best || step > *best) best = step;
        } catch (const std::exception&) {
            continue;  // stray directory; not ours
        }
    }
    return best;
}

}  // namespace archipelago
