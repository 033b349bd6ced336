#include <limits>
#include <vector>

#include "doctest.h"
#include "spdelab/errors.hpp"
#include "spdelab/svg_plot.hpp"

using namespace spdelab;

TEST_CASE("line plot") {
    const std::vector<PlotSeries> s{{"a<b", {0, 1, 2}, {1, 4, 9}}, {"flat", {0, 2}, {3, 3}}};
    const auto svg = line_plot_svg(s, {"title", "t", "u"});
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("a&lt;b") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(line_plot_svg({}, {"empty", "", ""}).find("</svg>") != std::string::npos);
}

TEST_CASE("histogram") {
    const std::vector<double> samples{0.1, 0.2, 0.2, 0.9, std::numeric_limits<double>::infinity()};
    const auto svg = histogram_svg(samples, 4, {"h", "y", "density"}, {{"pdf", {0.0, 0.5, 1.0}, {1, 1, 1}}});
    CHECK(svg.find("<rect") != std::string::npos);
    CHECK(svg.find("pdf") != std::string::npos);
    CHECK_THROWS_AS(histogram_svg(samples, 0, {}), ConfigError);
    CHECK(histogram_svg(std::vector<double>{}, 3, {}).find("</svg>") != std::string::npos);
}
