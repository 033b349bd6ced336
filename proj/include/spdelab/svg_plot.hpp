#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace spdelab {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotLabels {
    std::string title;
    std::string x;
    std::string y;
};

/// Polylines with axes and a legend. Non-finite points are skipped.
std::string line_plot_svg(const std::vector<PlotSeries>& series, const PlotLabels& labels);

/// Density histogram of the finite samples with optional overlaid curves.
/// Throws ConfigError for bins == 0.
std::string histogram_svg(std::span<const double> samples, std::size_t bins, const PlotLabels& labels,
                          const std::vector<PlotSeries>& overlays = {});

}  // namespace spdelab
