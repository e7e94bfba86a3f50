// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#include "ma_isac/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace ma_isac {

namespace {
const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
} // namespace

void write_line_svg(const std::string& path, const std::vector<SvgSeries>& series,
                    const std::string& title, const std::string& x_label,
                    const std::string& y_label) {
    const double width = 800, height = 500;
    const double ml = 70, mr = 20, mt = 40, mb = 55;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (!std::isfinite(xmin) || !std::isfinite(ymin)) {
        xmin = ymin = 0;
        xmax = ymax = 1;
    }
    if (xmax == xmin)
        xmax = xmin + 1;
    if (ymax == ymin)
        ymax = ymin + 1;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write svg file: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title << "</text>\n";

    // axes and ticks
    out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 6; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 6.0;
        const double yv = ymin + (ymax - ymin) * i / 6.0;
        out << "<line x1=\"" << px(xv) << "\" y1=\"" << height - mb << "\" x2=\"" << px(xv)
            << "\" y2=\"" << height - mb + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(xv) << "\" y=\"" << height - mb + 20
            << "\" text-anchor=\"middle\" font-size=\"11\">" << static_cast<int>(std::round(xv * 100)) / 100.0
            << "</text>\n";
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << ml << "\" y2=\""
            << py(yv) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << static_cast<int>(std::round(yv * 100)) / 100.0
            << "</text>\n";
    }
    out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << (mt + height - mb) / 2 << ")\">" << y_label << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % 6];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i]))
                continue;
            out << px(s.x[i]) << "," << py(s.y[i]) << " ";
        }
        out << "\"/>\n";
        const double ly = mt + 18.0 * static_cast<double>(si);
        out << "<line x1=\"" << width - mr - 130 << "\" y1=\"" << ly << "\" x2=\""
            << width - mr - 105 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << width - mr - 100 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
            << s.label << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace ma_isac
