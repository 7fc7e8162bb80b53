#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <doctest.h>

#include "archipelago/errors.hpp"
#include "archipelago/svg_plot.hpp"
#include "test_util.hpp"

using namespace archipelago;
using archipelago::testing::TempDir;

namespace {

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t at = haystack.find(needle); at != std::string::npos;
         at = haystack.find(needle, at + needle.size()))
        ++count;
    return count;
}

}  // namespace

TEST_CASE("a plot is a complete SVG document with its series drawn") {
    PlotSeries series;
    series.label = "collective return";
    series.values = {1.0, 2.0, 1.5, 3.0};
    PlotOptions options;
    options.title = "archipelago";
    options.x_label = "ecological step";
    options.y_label = "return";

    const std::string svg = render_line_plot({series}, options);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("collective return") != std::string::npos);
    CHECK(svg.find("ecological step") != std::string::npos);
    CHECK(svg.find("archipelago") != std::string::npos);
    CHECK(svg.find("<path") != std::string::npos);
    CHECK(svg.find("NaN") == std::string::npos);
    CHECK(svg.find("nan") == std::string::npos);
    CHECK(svg.find("inf") == std::string::npos);
}

TEST_CASE("plots render identical bytes for identical input") {
    PlotSeries series;
    series.label = "s";
    series.values = {0.25, 0.5, 0.125};
    const PlotOptions options;
    CHECK(render_line_plot({series}, options) == render_line_plot({series}, options));
}

TEST_CASE("null values split a series into disconnected runs") {
    PlotSeries series;
    series.label = "holes";
    series.values = {1.0, 2.0, std::nullopt, 4.0, 5.0};
    const std::string svg = render_line_plot({series}, PlotOptions{});
    // Two runs: the second one opens with its own moveto (" M") inside
    // the path data; an unbroken line would contain none.
    CHECK(count_occurrences(svg, " M") >= 1);

    PlotSeries solid;
    solid.label = "solid";
    solid.values = {1.0, 2.0, 3.0, 4.0, 5.0};
    const std::string joined = render_line_plot({solid}, PlotOptions{});
    CHECK(count_occurrences(joined, " M") == 0);

    // An all-null series still renders a document, just without its line.
    PlotSeries empty;
    empty.label = "void";
    empty.values = {std::nullopt, std::nullopt};
    const std::string blank = render_line_plot({empty}, PlotOptions{});
    CHECK(blank.rfind("<svg", 0) == 0);
}

TEST_CASE("explicit x coordinates and smoothing are honored") {
    PlotSeries series;
    series.label = "timed";
    series.xs = {0.0, 10.0, 20.0, 30.0};
    series.values = {1.0, 2.0, 3.0, 4.0};
    PlotOptions options;
    options.smooth_window = 2;
    const std::string svg = render_line_plot({series}, options);
    CHECK(svg.find("<path") != std::string::npos);

    PlotSeries ragged = series;
    ragged.xs = {0.0, 1.0};
    CHECK_THROWS_AS((void)render_line_plot({ragged}, options), ArgumentError);
    options.smooth_window = 0;
    CHECK_THROWS_AS((void)render_line_plot({series}, options), ArgumentError);
}

TEST_CASE("write_line_plot writes the rendered document") {
    TempDir dir;
    PlotSeries series;
    series.label = "file";
    series.values = {1.0, 0.0};
    const auto path = dir / "plot.svg";
    write_line_plot(path, {series}, PlotOptions{});
    REQUIRE(std::filesystem::exists(path));
    const std::string bytes = archipelago::testing::read_text(path);
    CHECK(bytes == render_line_plot({series}, PlotOptions{}));
}
