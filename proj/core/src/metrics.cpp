#include "archipelago/metrics.hpp"

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "archipelago/errors.hpp"

namespace archipelago {

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::vector<double> smooth(std::span<const double> series, int window) {
    if (window < 1) throw ArgumentError("smoothing window must be at least 1");
    std::vector<double> out(series.size());
    double running = 0.0;
    for (std::size_t n = 0; n < series.size(); ++n) {
        running += series[n];
        if (n >= static_cast<std::size_t>(window)) running -= series[n - window];
        const std::size_t span = std::min<std::size_t>(n + 1, window);
        out[n] = running / static_cast<double>(span);
    }
    return out;
}

std::vector<std::optional<double>> smooth_nullable(
    std::span<const std::optional<double>> series, int window) {
    if (window < 1) throw ArgumentError("smoothing window must be at least 1");
    std::vector<std::optional<double>> out(series.size());
    for (std::size_t n = 0; n < series.size(); ++n) {
        const std::size_t first = n + 1 >= static_cast<std::size_t>(window) ? n + 1 - window : 0;
        double sum = 0.0;
        long count = 0;
        for (std::size_t k = first; k <= n; ++k) {
            if (series[k]) {
                sum += *series[k];
                ++count;
            }
        }
        if (count > 0) out[n] = sum / static_cast<double>(count);
    }
    return out;
}

MetricsRow island_reductions(
    const FitnessReport& fitness, const Allocation& allocation,
    const std::vector<std::optional<std::vector<int>>>& switch_counts) {
    const int num_species = allocation.num_species();
    const int num_islands = allocation.num_islands();
    if (static_cast<int>(fitness.per_individual.size()) != num_species ||
        static_cast<int>(allocation.members.size()) != num_species)
        throw DataIntegrityError("fitness and allocation disagree on species count");
    if (static_cast<int>(switch_counts.size()) != num_islands)
        throw DataIntegrityError("switch counts do not cover every island");

    MetricsRow row;
    row.ecological_step = fitness.ecological_step;
    row.population.assign(num_islands, std::vector<int>(num_species, 0));
    row.collective_return.assign(num_islands, std::nullopt);
    row.per_capita_return.assign(num_islands, std::nullopt);
    row.min_switch_count.assign(num_islands, std::nullopt);

    for (int i = 0; i < num_islands; ++i) {
        long island_population = 0;
        double collective = 0.0;
        for (int l = 0; l < num_species; ++l) {
            if (static_cast<int>(allocation.members[l].size()) != num_islands)
                throw DataIntegrityError("allocation members have a ragged island axis");
            const auto& labels = allocation.members[l][i];
            row.population[i][l] = static_cast<int>(labels.size());
            island_population += static_cast<long>(labels.size());
            for (const int label : labels) {
                const auto it = fitness.per_individual[l].find(label);
                if (it == fitness.per_individual[l].end())
                    throw DataIntegrityError("individual missing a fitness entry");
                collective += it->second;
            }
        }
        if (island_population == 0) continue;  // empty island: stays null
        row.collective_return[i] = collective;
        row.per_capita_return[i] = collective / static_cast<double>(island_population);
        if (switch_counts[i]) {
            if (static_cast<long>(switch_counts[i]->size()) != island_population)
                throw DataIntegrityError("switch counts do not match island population");
            row.min_switch_count[i] =
                *std::min_element(switch_counts[i]->begin(), switch_counts[i]->end());
        }
        if (!row.max_collective_return || collective > *row.max_collective_return)
            row.max_collective_return = collective;
        const double per_capita = *row.per_capita_return[i];
        if (!row.max_per_capita_return || per_capita > *row.max_per_capita_return)
            row.max_per_capita_return = per_capita;
        if (!row.max_population || island_population > *row.max_population)
            row.max_population = island_population;
        if (row.min_switch_count[i] &&
            (!row.min_switch_reduction || *row.min_switch_count[i] < *row.min_switch_reduction))
            row.min_switch_reduction = *row.min_switch_count[i];
    }
    return row;
}

std::vector<std::string> MetricsSchema::columns() const {
    std::vector<std::string> names;
    names.emplace_back("e");
    for (int l = 0; l < num_species; ++l) names.push_back("updates_s" + std::to_string(l));
    for (int i = 0; i < num_islands; ++i)
        for (int l = 0; l < num_species; ++l)
            names.push_back("pop_i" + std::to_string(i) + "_s" + std::to_string(l));
    for (int i = 0; i < num_islands; ++i) names.push_back("collective_i" + std::to_string(i));
    for (int i = 0; i < num_islands; ++i) names.push_back("percapita_i" + std::to_string(i));
    if (switching_columns)
        for (int i = 0; i < num_islands; ++i) names.push_back("minswitch_i" + std::to_string(i));
    if (solitary_columns)
        for (int l = 0; l < num_species; ++l) names.push_back("solitary_s" + std::to_string(l));
    if (num_islands > 0) {
        names.emplace_back("max_collective_return");
        names.emplace_back("max_per_capita_return");
        names.emplace_back("max_population");
        if (switching_columns) names.emplace_back("min_switching");
    }
    return names;
}

namespace {

void append_cell(std::string& line, const std::optional<double>& value) {
    line.push_back(',');
    if (value) line += format_double(*value);
}

void append_cell(std::string& line, const std::optional<long>& value) {
    line.push_back(',');
    if (value) line += std::to_string(*value);
}

/// Keeps the header plus the first `rows` data rows of an existing file.
void truncate_csv(const std::filesystem::path& path, long rows) {
    std::ifstream in(path);
    if (!in) throw StateError("cannot open metrics file for resume: " + path.string());
    std::vector<std::string> kept;
    std::string line;
    while (static_cast<long>(kept.size()) < rows + 1 && std::getline(in, line))
        kept.push_back(line);
    if (static_cast<long>(kept.size()) < rows + 1)
        throw DataIntegrityError("metrics file has fewer rows than the checkpoint expects");
    in.close();
    std::ofstream out(path, std::ios::trunc);
    for (const std::string& row : kept) out << row << '\n';
}

}  // namespace

MetricsWriter::MetricsWriter(const std::filesystem::path& path, const MetricsSchema& schema,
                             long truncate_to_rows)
    : schema_(schema) {
    const bool fresh = truncate_to_rows < 0;
    if (!fresh) truncate_csv(path, truncate_to_rows);
    file_ = std::fopen(path.string().c_str(), fresh ? "w" : "a");
    if (file_ == nullptr)
        throw StateError("cannot open metrics file " + path.string() + ": " +
                         std::strerror(errno));
    if (fresh) {
        std::string header;
        for (const std::string& name : schema_.columns()) {
            if (!header.empty()) header.push_back(',');
            header += name;
        }
        header.push_back('\n');
        std::fputs(header.c_str(), file_);
    }
}

MetricsWriter::~MetricsWriter() {
    if (file_ != nullptr) std::fclose(file_);
}

void MetricsWriter::append(const MetricsRow& row) {
    if (static_cast<int>(row.population.size()) != schema_.num_islands)
        throw DataIntegrityError("metrics row has the wrong island count");
    std::string line = std::to_string(row.ecological_step);
    if (static_cast<int>(row.species_updates.size()) != schema_.num_species)
        throw DataIntegrityError("metrics row has the wrong species count");
    for (const long updates : row.species_updates) {
        line.push_back(',');
        line += std::to_string(updates);
    }
    for (int i = 0; i < schema_.num_islands; ++i) {
        if (static_cast<int>(row.population[i].size()) != schema_.num_species)
            throw DataIntegrityError("metrics row population has the wrong species count");
        for (int l = 0; l < schema_.num_species; ++l) {
            line.push_back(',');
            line += std::to_string(row.population[i][l]);
        }
    }
    for (int i = 0; i < schema_.num_islands; ++i) append_cell(line, row.collective_return[i]);
    for (int i = 0; i < schema_.num_islands; ++i) append_cell(line, row.per_capita_return[i]);
    if (schema_.switching_columns)
        for (int i = 0; i < schema_.num_islands; ++i) append_cell(line, row.min_switch_count[i]);
    if (schema_.solitary_columns) {
        if (static_cast<int>(row.solitary_return.size()) != schema_.num_species)
            throw DataIntegrityError("metrics row solitary returns have the wrong species count");
        for (int l = 0; l < schema_.num_species; ++l) append_cell(line, row.solitary_return[l]);
    }
    if (schema_.num_islands > 0) {
        append_cell(line, row.max_collective_return);
        append_cell(line, row.max_per_capita_return);
        append_cell(line, row.max_population);
        if (schema_.switching_columns) append_cell(line, row.min_switch_reduction);
    }
    line.push_back('\n');
    std::fputs(line.c_str(), file_);
}

void MetricsWriter::flush() { std::fflush(file_); }

int MetricsTable::column_index(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

std::vector<std::optional<double>> MetricsTable::column(const std::string& name) const {
    const int index = column_index(name);
    if (index < 0) throw ArgumentError("no metrics column named " + name);
    std::vector<std::optional<double>> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[static_cast<std::size_t>(index)]);
    return out;
}

MetricsTable read_metrics_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StateError("cannot open metrics file " + path.string());
    MetricsTable table;
    std::string line;
    if (!std::getline(in, line)) throw DataIntegrityError("metrics file is empty");
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) table.columns.push_back(cell);
    while (std::getline(in, line)) {
        std::vector<std::optional<double>> row;
        row.reserve(table.columns.size());
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const std::string field = line.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            if (field.empty()) {
                row.emplace_back(std::nullopt);
            } else {
                row.emplace_back(std::stod(field));
            }
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (row.size() != table.columns.size())
            throw DataIntegrityError("metrics row width does not match the header");
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace archipelago
