// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#pragma once

#include <string>
#include <vector>

namespace ma_isac {

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// single-panel line plot with axes, tick labels and a legend
void write_line_svg(const std::string& path, const std::vector<SvgSeries>& series,
                    const std::string& title, const std::string& x_label,
                    const std::string& y_label);

} // namespace ma_isac
