#pragma once

#include "fairsemi/types.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace fairsemi {

/// One named polyline for a line chart. Points are drawn in the given
/// order; non-finite coordinates are skipped, breaking the line there.
struct PlotSeries {
    std::string name;
    std::vector<std::pair<Scalar, Scalar>> points;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    int width = 720;
    int height = 480;
};

/// Writes a self-contained SVG line chart: axes, tick labels, one colored
/// polyline with point markers per series, and a legend. Throws ValueError
/// when no series contains a finite point and DataError when the file
/// cannot be written.
void write_line_chart(const PlotSpec& spec, const std::filesystem::path& path);

}  // namespace fairsemi
