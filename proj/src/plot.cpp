#include "ibmag/plot.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace ibmag {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string escape(const std::string& s) {
    std::string out;
    for (char const c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_svg_plot(std::ostream& out, const PlotSpec& spec) {
    double x0 = std::numeric_limits<double>::infinity();
    double x1 = -x0;
    double y0 = 0.0;
    double y1 = -x0;
    for (auto const& s : spec.series) {
        for (auto const& p : s.points) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.force);
            y1 = std::max(y1, p.force);
        }
    }
    if (!std::isfinite(x0)) {
        x0 = 0.0;
        x1 = 1.0;
        y1 = 1.0;
    }
    if (x1 <= x0) x1 = x0 + 1.0;
    if (y1 <= y0) y1 = y0 + 1.0;
    y1 += 0.05 * (y1 - y0);

    double const pw = kWidth - kLeft - kRight;
    double const ph = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return kTop + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    fmt::print(out,
               "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
               "font-family=\"sans-serif\" font-size=\"12\">\n",
               kWidth, kHeight);
    fmt::print(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    fmt::print(out, "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
               kWidth / 2, escape(spec.title));
    fmt::print(out, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
               kLeft, kTop, pw, ph);

    for (int i = 0; i <= 5; ++i) {
        double const xv = x0 + (x1 - x0) * i / 5.0;
        double const yv = y0 + (y1 - y0) * i / 5.0;
        fmt::print(out, "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.3g}</text>\n", sx(xv),
                   kHeight - kBottom + 16, xv);
        fmt::print(out, "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n", kLeft - 6,
                   sy(yv) + 4, yv);
    }
    if (y0 < 0.0) {
        fmt::print(out, "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#999\"/>\n",
                   kLeft, sy(0.0), kLeft + pw, sy(0.0));
    }
    fmt::print(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2,
               kHeight - 12, escape(spec.x_label));
    fmt::print(out,
               "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
               kTop + ph / 2, kTop + ph / 2, escape(spec.y_label));

    double legend_y = kTop + 16;
    for (auto const& s : spec.series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (auto const& p : s.points) fmt::print(out, "{:.2f},{:.2f} ", sx(p.x), sy(p.force));
        out << "\"/>\n";
        fmt::print(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" fill=\"{}\">{}</text>\n",
                   kLeft + pw - 8, legend_y, s.color, escape(s.label));
        legend_y += 16;
    }
    out << "</svg>\n";
}

}  // namespace ibmag
