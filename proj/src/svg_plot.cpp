#include "spdelab/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "spdelab/errors.hpp"

namespace spdelab {

namespace {

constexpr double kWidth = 720, kHeight = 450;
constexpr double kLeft = 70, kRight = 160, kTop = 40, kBottom = 55;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Frame {
    double x0, x1, y0, y1;

    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void widen(double& lo, double& hi) {
    if (!(lo < hi)) {
        const double pad = lo == 0.0 ? 1.0 : std::fabs(lo) * 0.05;
        lo -= pad;
        hi += pad;
    }
}

void header(std::ostringstream& os, const Frame& f, const PlotLabels& labels) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
       << escape(labels.title) << "</text>\n";
    const double bx = kLeft, by = kHeight - kBottom;
    const double ex = kWidth - kRight, ey = kTop;
    os << "<line x1=\"" << bx << "\" y1=\"" << by << "\" x2=\"" << ex << "\" y2=\"" << by
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << bx << "\" y1=\"" << by << "\" x2=\"" << bx << "\" y2=\"" << ey
       << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = f.x0 + (f.x1 - f.x0) * i / 5.0;
        const double yv = f.y0 + (f.y1 - f.y0) * i / 5.0;
        os << "<text x=\"" << f.px(xv) << "\" y=\"" << by + 18 << "\" text-anchor=\"middle\">" << fmt(xv)
           << "</text>\n";
        os << "<text x=\"" << bx - 6 << "\" y=\"" << f.py(yv) + 4 << "\" text-anchor=\"end\">" << fmt(yv)
           << "</text>\n";
    }
    os << "<text x=\"" << (bx + ex) / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
       << escape(labels.x) << "</text>\n";
    os << "<text transform=\"translate(16," << (by + ey) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(labels.y) << "</text>\n";
}

void polyline(std::ostringstream& os, const Frame& f, const PlotSeries& s, const char* color) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        os << f.px(s.x[i]) << ',' << f.py(s.y[i]) << ' ';
    }
    os << "\"/>\n";
}

void legend(std::ostringstream& os, const std::vector<PlotSeries>& series, std::size_t offset) {
    for (std::size_t i = 0; i < series.size() && i < 20; ++i) {
        const double y = kTop + 14.0 * static_cast<double>(i + offset);
        const char* color = kColors[(i + offset) % std::size(kColors)];
        os << "<rect x=\"" << kWidth - kRight + 10 << "\" y=\"" << y << "\" width=\"10\" height=\"10\" fill=\""
           << color << "\"/>\n";
        os << "<text x=\"" << kWidth - kRight + 24 << "\" y=\"" << y + 9 << "\">" << escape(series[i].label)
           << "</text>\n";
    }
}

}  // namespace

std::string line_plot_svg(const std::vector<PlotSeries>& series, const PlotLabels& labels) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    widen(x0, x1);
    widen(y0, y1);
    const Frame f{x0, x1, y0, y1};
    std::ostringstream os;
    header(os, f, labels);
    for (std::size_t i = 0; i < series.size(); ++i) polyline(os, f, series[i], kColors[i % std::size(kColors)]);
    legend(os, series, 0);
    os << "</svg>\n";
    return os.str();
}

std::string histogram_svg(std::span<const double> samples, std::size_t bins, const PlotLabels& labels,
                          const std::vector<PlotSeries>& overlays) {
    if (bins == 0) throw ConfigError("histogram needs at least one bin");
    std::vector<double> v;
    for (double s : samples) {
        if (std::isfinite(s)) v.push_back(s);
    }
    double lo = v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
    double hi = v.empty() ? 1.0 : *std::max_element(v.begin(), v.end());
    widen(lo, hi);
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<double> density(bins, 0.0);
    for (double s : v) density[std::min(bins - 1, static_cast<std::size_t>((s - lo) / width))] += 1.0;
    double top = 0.0;
    for (double& d : density) {
        d /= static_cast<double>(std::max<std::size_t>(1, v.size())) * width;
        top = std::max(top, d);
    }
    for (const auto& o : overlays) {
        for (std::size_t i = 0; i < o.x.size() && i < o.y.size(); ++i) {
            if (o.x[i] >= lo && o.x[i] <= hi && std::isfinite(o.y[i])) top = std::max(top, o.y[i]);
        }
    }
    if (!(top > 0.0)) top = 1.0;
    const Frame f{lo, hi, 0.0, top * 1.05};
    std::ostringstream os;
    header(os, f, labels);
    for (std::size_t b = 0; b < bins; ++b) {
        const double a = lo + width * static_cast<double>(b);
        const double xa = f.px(a), xb = f.px(a + width);
        const double ya = f.py(density[b]), yb = f.py(0.0);
        os << "<rect x=\"" << xa << "\" y=\"" << ya << "\" width=\"" << std::max(0.0, xb - xa - 1)
           << "\" height=\"" << std::max(0.0, yb - ya) << "\" fill=\"#9ecae1\"/>\n";
    }
    for (std::size_t i = 0; i < overlays.size(); ++i) {
        PlotSeries clipped = overlays[i];
        for (std::size_t k = 0; k < clipped.x.size(); ++k) {
            if (clipped.x[k] < lo || clipped.x[k] > hi) clipped.y[k] = std::numeric_limits<double>::quiet_NaN();
        }
        polyline(os, f, clipped, kColors[(i + 1) % std::size(kColors)]);
    }
    legend(os, overlays, 1);
    os << "</svg>\n";
    return os.str();
}

}  // namespace spdelab
