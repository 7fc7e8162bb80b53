#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace archipelago {

/// One polyline. xs empty means 0..n-1; null values break the line into
/// disconnected runs instead of plotting 0.
struct PlotSeries {
    std::string label;
    std::vector<double> xs;
    std::vector<std::optional<double>> values;
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 960;
    int height = 540;
    int smooth_window = 1;  // trailing moving average applied before drawing
};

/// Self-contained SVG line plot (axes, ticks, legend). Deterministic text:
/// no timestamps, stable float formatting.
[[nodiscard]] std::string render_line_plot(const std::vector<PlotSeries>& series,
                                           const PlotOptions& options);

void write_line_plot(const std::filesystem::path& path, const std::vector<PlotSeries>& series,
                     const PlotOptions& options);

}  // namespace archipelago
