#include "archipelago/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "archipelago/errors.hpp"
#include "archipelago/metrics.hpp"

namespace archipelago {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string tick_label(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.6g", value);
    return buffer;
}

std::string escape_text(const std::string& text) {
    std::string out;
    for (const char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace

std::string render_line_plot(const std::vector<PlotSeries>& series, const PlotOptions& options) {
    if (options.width < 200 || options.height < 120)
        throw ArgumentError("plot canvas is too small");
    if (options.smooth_window < 1) throw ArgumentError("smoothing window must be at least 1");

    // Resolve each series to (x, y-or-null) pairs with smoothing applied.
    struct Resolved {
        std::string label;
        std::vector<double> xs;
        std::vector<std::optional<double>> ys;
    };
    std::vector<Resolved> resolved;
    double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
    bool any_point = false;
    for (const PlotSeries& s : series) {
        Resolved r;
        r.label = s.label;
        r.ys = smooth_nullable(s.values, options.smooth_window);
        if (!s.xs.empty() && s.xs.size() != s.values.size())
            throw ArgumentError("series '" + s.label + "' has mismatched x and y lengths");
        r.xs.resize(r.ys.size());
        for (std::size_t i = 0; i < r.ys.size(); ++i) {
            r.xs[i] = s.xs.empty() ? static_cast<double>(i) : s.xs[i];
            if (!r.ys[i]) continue;
            if (!any_point) {
                x_min = x_max = r.xs[i];
                y_min = y_max = *r.ys[i];
                any_point = true;
            } else {
                x_min = std::min(x_min, r.xs[i]);
                x_max = std::max(x_max, r.xs[i]);
                y_min = std::min(y_min, *r.ys[i]);
                y_max = std::max(y_max, *r.ys[i]);
            }
        }
        resolved.push_back(std::move(r));
    }
    if (x_max - x_min < 1e-12) x_max = x_min + 1.0;
    if (y_max - y_min < 1e-12) y_max = y_min + 1.0;

    const double left = 72, right = 24, top = 40, bottom = 52;
    const double plot_w = options.width - left - right;
    const double plot_h = options.height - top - bottom;
    const auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
    const auto sy = [&](double y) {
        return top + plot_h - (y - y_min) / (y_max - y_min) * plot_h;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
        << "\" height=\"" << options.height << "\" viewBox=\"0 0 " << options.width << ' '
        << options.height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << options.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << escape_text(options.title)
        << "</text>\n";

    // Axes with 5 ticks per side.
    svg << "<g stroke=\"#333333\" stroke-width=\"1\" fill=\"none\">\n";
    svg << "<path d=\"M" << left << ' ' << top << " L" << left << ' ' << top + plot_h << " L"
        << left + plot_w << ' ' << top + plot_h << "\"/>\n";
    svg << "</g>\n";
    svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double fx = x_min + (x_max - x_min) * tick / 4.0;
        const double fy = y_min + (y_max - y_min) * tick / 4.0;
        svg << "<line x1=\"" << sx(fx) << "\" y1=\"" << top + plot_h << "\" x2=\"" << sx(fx)
            << "\" y2=\"" << top + plot_h + 5 << "\" stroke=\"#333333\"/>\n";
        svg << "<text x=\"" << sx(fx) << "\" y=\"" << top + plot_h + 18
            << "\" text-anchor=\"middle\">" << tick_label(fx) << "</text>\n";
        svg << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(fy) << "\" x2=\"" << left
            << "\" y2=\"" << sy(fy) << "\" stroke=\"#333333\"/>\n";
        svg << "<text x=\"" << left - 8 << "\" y=\"" << sy(fy) + 4
            << "\" text-anchor=\"end\">" << tick_label(fy) << "</text>\n";
    }
    svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << options.height - 10
        << "\" text-anchor=\"middle\">" << escape_text(options.x_label) << "</text>\n";
    svg << "<text x=\"16\" y=\"" << top + plot_h / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << top + plot_h / 2 << ")\">"
        << escape_text(options.y_label) << "</text>\n";
    svg << "</g>\n";

    for (std::size_t s = 0; s < resolved.size(); ++s) {
        const Resolved& r = resolved[s];
        const char* color = kPalette[s % kPaletteSize];
        std::ostringstream d;
        bool in_run = false;
        for (std::size_t i = 0; i < r.ys.size(); ++i) {
            if (!r.ys[i]) {
                in_run = false;  // null: break the polyline
                continue;
            }
            d << (in_run ? " L" : " M") << sx(r.xs[i]) << ' ' << sy(*r.ys[i]);
            in_run = true;
        }
        const std::string path = d.str();
        if (!path.empty())
            svg << "<path fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" d=\""
                << path.substr(1) << "\"/>\n";
        svg << "<text font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color << "\" x=\""
            << left + plot_w - 8 << "\" y=\"" << top + 16 + 16 * static_cast<double>(s)
            << "\" text-anchor=\"end\">" << escape_text(r.label) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_line_plot(const std::filesystem::path& path, const std::vector<PlotSeries>& series,
                     const PlotOptions& options) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw StateError("cannot write plot " + path.string());
    out << render_line_plot(series, options);
    if (!out) throw StateError("short write to plot " + path.string());
}

}  // namespace archipelago
