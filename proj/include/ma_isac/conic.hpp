// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace ma_isac {

// Dense conic program in the form
//     minimize    c'x
//     subject to  A x + s = b,   s in K,
// where K is a product of nonnegative-orthant, second-order and complex
// Hermitian PSD cones. Solved with a homogeneous self-dual embedding,
// Nesterov-Todd scaling and Mehrotra predictor-corrector steps.
//
// Hermitian blocks use an isometric real svec encoding of length n^2:
// per column j: sqrt(2)*Re H(i,j), sqrt(2)*Im H(i,j) for i < j, then H(j,j).
// tr(X Y) = svec(X)'svec(Y).

enum class ConeKind { NonNeg, Soc, PsdHermitian };

struct ConeBlock {
    ConeKind kind;
    int dim; // NonNeg: entries; Soc: vector length; PsdHermitian: matrix order
};

int cone_block_len(const ConeBlock& blk);

int hermitian_svec_len(int n);
Eigen::VectorXd svec_hermitian(const Eigen::MatrixXcd& h);
Eigen::MatrixXcd smat_hermitian(const Eigen::VectorXd& v, int n);
// position of diagonal entry (j,j) inside the svec of an order-n block
int svec_diag_index(int j);

struct ConicProblem {
    Eigen::VectorXd c;
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    std::vector<ConeBlock> cones;
    // For PSD blocks whose rows in `a` are exactly -scale*I on a contiguous
    // column range: the starting column (enables the fast Schur assembly).
    // -1 = no such structure; must have one entry per PSD block when
    // non-empty. psd_identity_scale defaults to 1 per block; the equilibrator
    // maintains it.
    std::vector<int> psd_identity_col;
    std::vector<double> psd_identity_scale;
};

enum class ConicStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIters, NumericalProblem };

std::string to_string(ConicStatus s);

struct ConicSettings {
    int max_iters = 100;
    double feas_tol = 1e-8;
    double rel_gap_tol = 1e-8;
    double abs_gap_tol = 1e-10;
    double step_scale = 0.99;
    int refine_steps = 2;
    bool verbose = false;
};

struct ConicSolution {
    ConicStatus status = ConicStatus::NumericalProblem;
    Eigen::VectorXd x; // primal solution (already divided by tau)
    Eigen::VectorXd s;
    Eigen::VectorXd z;
    double primal_obj = 0.0;
    double dual_obj = 0.0;
    double pres = 0.0;
    double dres = 0.0;
    double gap = 0.0;
    double rel_gap = 0.0;
    int iterations = 0;
};

ConicSolution solve_conic(const ConicProblem& prob, const ConicSettings& settings = {});

} // namespace ma_isac
