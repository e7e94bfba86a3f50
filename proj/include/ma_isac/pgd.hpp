// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#pragma once

#include "ma_isac/channel.hpp"
#include "ma_isac/geometry.hpp"
#include "ma_isac/scenario.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace ma_isac {

// Analytic gradient of the augmented-Lagrangian objective F with respect to
// the antenna positions, with (W, Q) held fixed. Assembled by the chain rule
// through the steering vector and the per-user channels; matches central
// finite differences of al_objective_lifted.
Eigen::VectorXd gradient_positions(const Positions& t, const std::vector<Eigen::MatrixXcd>& w_lifted,
                                   const Eigen::MatrixXd& q, const Eigen::MatrixXd& xi, double rho,
                                   const std::vector<PathSet>& paths, double theta_s,
                                   double wavelength);

enum class PgdStop { Converged, MaxIters, StepRejected, ZeroGradient };

struct PgdTrace {
    std::vector<double> f_values;      // F after each accepted step, starting at F(t0)
    std::vector<double> steps;         // accepted step sizes
    std::vector<double> grad_norms_sq; // |grad F|^2 at the accepted iterates
    int iterations = 0;
    PgdStop reason = PgdStop::MaxIters;
};

// Projected gradient descent with backtracking line search. A candidate step
// gamma is accepted when F(proj(t - gamma*g)) <= F(t) - armijo_c*gamma*|g|^2;
// exhausting the backtracks rejects the step and terminates.
std::pair<Positions, PgdTrace> run_pgd(const Positions& t0,
                                       const std::vector<Eigen::MatrixXcd>& w_lifted,
                                       const Eigen::MatrixXd& q, const Eigen::MatrixXd& xi,
                                       double rho, const std::vector<PathSet>& paths, double theta_s,
                                       double wavelength, double aperture, const PgdKnobs& knobs);

} // namespace ma_isac
