// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#include "ma_isac/geometry.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace ma_isac {

bool is_feasible(const Positions& t, double aperture, double wavelength, double tol) {
    const Eigen::Index n = t.size();
    if (n < 1)
        return false;
    for (Eigen::Index p = 0; p < n; ++p) {
        if (t[p] < -tol || t[p] > aperture + tol)
            return false;
        if (p > 0 && t[p] - t[p - 1] < wavelength / 2.0 - tol)
            return false;
    }
    return true;
}

Positions project_positions(Positions t, double aperture, double wavelength) {
    const Eigen::Index n = t.size();
    if (n == 0)
        return t;
    std::sort(t.data(), t.data() + n);
    const double half = wavelength / 2.0;
    const double interior_hi = aperture - (n - 1) * half;
    for (Eigen::Index p = 0; p < n; ++p) {
        if (p == 0)
            t[p] = std::max(0.0, std::min(interior_hi, t[p]));
        else if (p == n - 1)
            t[p] = std::max(t[p - 1] + half, std::min(aperture, t[p]));
        else
            t[p] = std::max(t[p - 1] + half, std::min(interior_hi, t[p]));
    }
    return t;
}

Positions initial_positions(int num_antennas, double aperture, double wavelength, InitScheme scheme) {
    if (num_antennas < 1)
        throw std::invalid_argument("initial_positions: need at least one antenna");
    if (aperture < (num_antennas - 1) * wavelength / 2.0)
        throw std::invalid_argument("initial_positions: infeasible geometry, aperture too small");
    Positions t(num_antennas);
    switch (scheme) {
    case InitScheme::UniformSpread:
        if (num_antennas == 1)
            t[0] = aperture / 2.0;
        else
            for (int p = 0; p < num_antennas; ++p)
                t[p] = p * aperture / (num_antennas - 1);
        break;
    case InitScheme::UlaCompact:
        for (int p = 0; p < num_antennas; ++p)
            t[p] = p * wavelength / 2.0;
        break;
    }
    return t;
}

Positions sample_random_positions(Rng& rng, int num_antennas, double aperture, double wavelength) {
    if (num_antennas < 1)
        throw std::invalid_argument("sample_random_positions: need at least one antenna");
    const double slack = aperture - (num_antennas - 1) * wavelength / 2.0;
    if (slack < 0.0)
        throw std::invalid_argument("sample_random_positions: infeasible geometry, aperture too small");
    std::vector<double> u(num_antennas);
    for (auto& v : u)
        v = rng.uniform();
    std::sort(u.begin(), u.end());
    Positions t(num_antennas);
    for (int p = 0; p < num_antennas; ++p)
        t[p] = u[p] * slack + p * wavelength / 2.0;
    return t;
}

} // namespace ma_isac
