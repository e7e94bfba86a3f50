// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#pragma once

#include <cmath>

namespace ma_isac {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

inline double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

inline double watts_to_dbm(double w) { return 10.0 * std::log10(w * 1e3); }

inline double deg_to_rad(double deg) { return deg * M_PI / 180.0; }

inline double rad_to_deg(double rad) { return rad * 180.0 / M_PI; }

} // namespace ma_isac
