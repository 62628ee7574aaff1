#pragma once

// Bare-bones SVG line plots for reports. Presentation only.

#include "ibmag/force_curve.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ibmag {

struct PlotSeries {
    std::string label;
    std::vector<Sample> points;
    std::string color = "#1f77b4";
};

struct PlotSpec {
    std::string title;
    std::string x_label = "displacement [mm]";
    std::string y_label = "force [N]";
    std::vector<PlotSeries> series;
};

void write_svg_plot(std::ostream& out, const PlotSpec& spec);

}  // namespace ibmag
