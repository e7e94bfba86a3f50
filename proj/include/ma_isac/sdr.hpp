// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#pragma once

#include "ma_isac/channel.hpp"
#include "ma_isac/conic.hpp"
#include "ma_isac/geometry.hpp"

#include <Eigen/Dense>

#include <vector>

namespace ma_isac {

struct RankOneExtraction {
    Eigen::VectorXcd w;    // sqrt(lambda_1) * u_1, phase-canonicalized
    double ratio = 0.0;    // lambda_2 / lambda_1
    bool certified = true; // ratio <= tol
    bool is_zero = false;
};

// Principal-eigenpair extraction with the lambda2/lambda1 rank-one certificate.
// A failed certificate still returns the principal component, flagged.
RankOneExtraction extract_rank_one(const Eigen::MatrixXcd& w_lifted, double tol = 1e-6);

struct InnerSdpSolution {
    ConicStatus status = ConicStatus::NumericalProblem;
    std::vector<Eigen::MatrixXcd> w_lifted; // K Hermitian PSD matrices
    Beamformer w_columns;                   // rank-one extraction per user
    Eigen::MatrixXd q;
    double objective = 0.0; // F at the solution (minimization sense)
    Eigen::VectorXd rank_ratio;
    bool rank_certified = false;
    double pres = 0.0, dres = 0.0, rel_gap = 0.0;
    int iterations = 0;
};

// Global solve of the AL inner subproblem over (W, Q) at fixed positions:
//   min  -a^H (sum_k W_k) a + 1/(2 rho) ||Q - V(W) + rho*xi||_F^2
//   s.t. sum_k tr(W_k) <= P_t, W_k >= 0,
//        Q_kk - Gamma_k sum_{i!=k} Q_ki - sigma^2 Gamma_k >= 0.
// The quadratic penalty enters through a rotated second-order cone epigraph.
// This problem is always feasible; an infeasible status signals a bug.
InnerSdpSolution solve_inner_sdp(const Positions& t, const Eigen::MatrixXd& xi, double rho,
                                 const std::vector<Eigen::VectorXcd>& h, const Eigen::VectorXd& gamma,
                                 double noise_power, double tx_power, double theta_s,
                                 double wavelength, const ConicSettings& settings = {});

struct FixedSdpResult {
    ConicStatus status = ConicStatus::NumericalProblem;
    bool feasible = false; // false <=> SINR targets unattainable at this geometry
    std::vector<Eigen::MatrixXcd> w_lifted;
    Beamformer w_columns;
    Eigen::VectorXd rank_ratio;
    bool rank_certified = false;
    double gain = 0.0; // a^H (sum_k W_k) a at the optimum, absolute units
    int iterations = 0;
};

// Exact fixed-position design: max a^H (sum_k W_k) a with lifted SINR
// constraints h_k^H W_k h_k >= Gamma_k (sum_{i!=k} h_k^H W_i h_k + sigma^2).
// Used by the FA / MAs-Random baselines and as the final PDD polish.
FixedSdpResult solve_fixed_position_sdp(const Positions& t, const std::vector<Eigen::VectorXcd>& h,
                                        const Eigen::VectorXd& gamma, double noise_power,
                                        double tx_power, double theta_s, double wavelength,
                                        const ConicSettings& settings = {});

} // namespace ma_isac
