// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#pragma once

#include "ma_isac/geometry.hpp"
#include "ma_isac/scenario.hpp"

#include <Eigen/Dense>

#include <vector>

namespace ma_isac {

// Columns are the per-user beamforming vectors w_k.
using Beamformer = Eigen::MatrixXcd;

// entry p = exp(-j * 2*pi * sin(theta) * t_p / lambda)
Eigen::VectorXcd steering_vector(double theta, const Positions& t, double wavelength);

// h_k = sum_l sigma_{k,l} * g(theta_{k,l}, t); depends on t
Eigen::VectorXcd synthesize_channel(const PathSet& paths, const Positions& t, double wavelength);

std::vector<Eigen::VectorXcd> synthesize_channels(const std::vector<PathSet>& paths, const Positions& t,
                                                  double wavelength);

// |h_k^H w_k|^2 / (sum_{i != k} |h_k^H w_i|^2 + noise_power)
double sinr(const std::vector<Eigen::VectorXcd>& h, const Beamformer& w, double noise_power, int k);

// ||a(theta,t)^H W_D||^2
double beampattern_gain(const Positions& t, const Beamformer& w, double theta, double wavelength);

std::vector<double> beampattern_sweep(const Positions& t, const Beamformer& w, double wavelength,
                                      const std::vector<double>& theta_grid);

// V_{ki} = |h_k^H w_i|^2
Eigen::MatrixXd coupling_v(const std::vector<Eigen::VectorXcd>& h, const Beamformer& w);

// Same quantity from lifted matrices, V_{ki} = tr(H_k W_i) = h_k^H W_i h_k
Eigen::MatrixXd coupling_v_lifted(const std::vector<Eigen::VectorXcd>& h,
                                  const std::vector<Eigen::MatrixXcd>& w_lifted);

// F = -a^H (sum_k W_k) a + 1/(2 rho) * ||Q - V + rho*xi||_F^2  (minimization sense)
double al_objective(const Positions& t, const Beamformer& w, const Eigen::MatrixXd& q,
                    const Eigen::MatrixXd& xi, double rho, double theta_s, double wavelength,
                    const std::vector<Eigen::VectorXcd>& h);

double al_objective_lifted(const Positions& t, const std::vector<Eigen::MatrixXcd>& w_lifted,
                           const Eigen::MatrixXd& q, const Eigen::MatrixXd& xi, double rho,
                           double theta_s, double wavelength, const std::vector<Eigen::VectorXcd>& h);

// max_{k,i} |Q_{ki} - V_{ki}|
double violation_inf(const Eigen::MatrixXd& q, const Eigen::MatrixXd& v);

} // namespace ma_isac
