// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#pragma once

#include "ma_isac/rng.hpp"

#include <Eigen/Dense>

namespace ma_isac {

// Antenna positions along the array axis, meters, sorted ascending.
using Positions = Eigen::VectorXd;

// Both aperture bounds and the lambda/2 spacing, within abs tolerance tol.
bool is_feasible(const Positions& t, double aperture, double wavelength, double tol = 1e-9);

// Feasibility-restoring clamp: sort ascending, then for p = 1..N apply the
// piecewise clamp using the already-updated left neighbour. Idempotent, and
// the identity on feasible inputs. Not the Euclidean projection.
Positions project_positions(Positions t, double aperture, double wavelength);

enum class InitScheme { UniformSpread, UlaCompact };

Positions initial_positions(int num_antennas, double aperture, double wavelength, InitScheme scheme);

// Uniform over the feasible polytope via the gap transform: order statistics
// of U(0,1) scaled into the free length, plus mandatory lambda/2 gaps.
Positions sample_random_positions(Rng& rng, int num_antennas, double aperture, double wavelength);

} // namespace ma_isac
