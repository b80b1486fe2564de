#include "fairsemi/svg_plot.hpp"

#include "fairsemi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace fairsemi {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string escape_xml(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(Scalar v) {
    std::ostringstream out;
    out << std::setprecision(6) << v;
    return out.str();
}

/// Picks a round step so the axis gets roughly `target` ticks.
Scalar tick_step(Scalar span, int target) {
    if (span <= 0) return 1.0;
    Scalar raw = span / target;
    Scalar mag = std::pow(10.0, std::floor(std::log10(raw)));
    Scalar norm = raw / mag;
    Scalar step;
    if (norm < 1.5)
        step = 1.0;
    else if (norm < 3.5)
        step = 2.0;
    else if (norm < 7.5)
        step = 5.0;
    else
        step = 10.0;
    return step * mag;
}

}  // namespace

void write_line_chart(const PlotSpec& spec, const std::filesystem::path& path) {
    Scalar x_min = std::numeric_limits<Scalar>::infinity();
    Scalar x_max = -x_min;
    Scalar y_min = x_min;
    Scalar y_max = -x_min;
    bool any = false;
    for (const auto& s : spec.series) {
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            any = true;
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    if (!any) throw ValueError("write_line_chart: no finite data points to plot");
    if (x_max == x_min) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if (y_max == y_min) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    // a little headroom so markers near the border stay inside the frame
    Scalar y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    const int w = spec.width;
    const int h = spec.height;
    const int left = 70;
    const int right = w - 30;
    const int top = 50;
    const int bottom = h - 60;
    auto sx = [&](Scalar x) { return left + (x - x_min) / (x_max - x_min) * (right - left); };
    auto sy = [&](Scalar y) { return bottom - (y - y_min) / (y_max - y_min) * (bottom - top); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    svg << "  <rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    svg << "  <text x=\"" << (w / 2) << "\" y=\"28\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << escape_xml(spec.title)
        << "</text>\n";

    // gridlines and tick labels
    Scalar xs = tick_step(x_max - x_min, 6);
    Scalar ys = tick_step(y_max - y_min, 6);
    svg << "  <g font-family=\"sans-serif\" font-size=\"11\" fill=\"#444444\">\n";
    for (Scalar t = std::ceil(x_min / xs) * xs; t <= x_max + 1e-9 * xs; t += xs) {
        Scalar px = sx(t);
        svg << "    <line x1=\"" << fmt(px) << "\" y1=\"" << top << "\" x2=\"" << fmt(px)
            << "\" y2=\"" << bottom << "\" stroke=\"#dddddd\"/>\n";
        svg << "    <text x=\"" << fmt(px) << "\" y=\"" << (bottom + 18)
            << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
    }
    for (Scalar t = std::ceil(y_min / ys) * ys; t <= y_max + 1e-9 * ys; t += ys) {
        Scalar py = sy(t);
        svg << "    <line x1=\"" << left << "\" y1=\"" << fmt(py) << "\" x2=\"" << right
            << "\" y2=\"" << fmt(py) << "\" stroke=\"#dddddd\"/>\n";
        svg << "    <text x=\"" << (left - 8) << "\" y=\"" << fmt(py + 4)
            << "\" text-anchor=\"end\">" << fmt(t) << "</text>\n";
    }
    svg << "  </g>\n";

    // axes
    svg << "  <line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\""
        << bottom << "\" stroke=\"black\"/>\n";
    svg << "  <line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << bottom << "\" stroke=\"black\"/>\n";
    svg << "  <text x=\"" << ((left + right) / 2) << "\" y=\"" << (h - 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << escape_xml(spec.x_label) << "</text>\n";
    svg << "  <text x=\"20\" y=\"" << ((top + bottom) / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 20 " << ((top + bottom) / 2) << ")\">"
        << escape_xml(spec.y_label) << "</text>\n";

    // series polylines with markers; non-finite points break the line
    for (std::size_t i = 0; i < spec.series.size(); ++i) {
        const auto& s = spec.series[i];
        const char* color = kPalette[i % kPaletteSize];
        std::vector<std::pair<Scalar, Scalar>> segment;
        auto flush = [&]() {
            if (segment.size() >= 2) {
                svg << "  <polyline fill=\"none\" stroke=\"" << color
                    << "\" stroke-width=\"2\" points=\"";
                for (const auto& [x, y] : segment) svg << fmt(sx(x)) << "," << fmt(sy(y)) << " ";
                svg << "\"/>\n";
            }
            segment.clear();
        };
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) {
                flush();
                continue;
            }
            segment.emplace_back(x, y);
            svg << "  <circle cx=\"" << fmt(sx(x)) << "\" cy=\"" << fmt(sy(y))
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        flush();
    }

    // legend in the top-right corner of the plot area
    svg << "  <g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (std::size_t i = 0; i < spec.series.size(); ++i) {
        const char* color = kPalette[i % kPaletteSize];
        int ly = top + 8 + static_cast<int>(i) * 18;
        svg << "    <rect x=\"" << (right - 150) << "\" y=\"" << ly
            << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n";
        svg << "    <text x=\"" << (right - 133) << "\" y=\"" << (ly + 10) << "\">"
            << escape_xml(spec.series[i].name) << "</text>\n";
    }
    svg << "  </g>\n";
    svg << "</svg>\n";

    std::ofstream out(path);
    if (!out) throw DataError("write_line_chart: cannot open " + path.string());
    out << svg.str();
    if (!out) throw DataError("write_line_chart: write failed for " + path.string());
}

}  // namespace fairsemi
