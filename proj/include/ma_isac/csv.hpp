// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#pragma once

#include <string>
#include <vector>

namespace ma_isac {

// deterministic round-trip formatting; infinities print as inf/-inf
std::string format_double(double v);

// rows of a comma-separated file, skipping blank and '#' comment lines
std::vector<std::vector<std::string>> read_csv(const std::string& path);

} // namespace ma_isac
