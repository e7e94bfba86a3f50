// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#include "ma_isac/sdr.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace ma_isac {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;

// columns of the svec coordinates of block k when blocks are stacked first
inline int block_col(int k, int ns) { return k * ns; }

void add_trace_row(Eigen::MatrixXd& a, int row, int col0, int n, double coeff) {
    for (int j = 0; j < n; ++j)
        a(row, col0 + svec_diag_index(j)) += coeff;
}

} // namespace

RankOneExtraction extract_rank_one(const Eigen::MatrixXcd& w_lifted, double tol) {
    RankOneExtraction out;
    const int n = static_cast<int>(w_lifted.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((w_lifted + w_lifted.adjoint()) / 2.0);
    const Eigen::VectorXd ev = es.eigenvalues(); // ascending
    const double l1 = ev[n - 1];
    const double l2 = n > 1 ? std::max(0.0, ev[n - 2]) : 0.0;
    if (l1 <= 0.0 || l1 < 1e-14 * w_lifted.cwiseAbs().maxCoeff()) {
        out.w = Eigen::VectorXcd::Zero(n);
        out.ratio = 0.0;
        out.certified = true;
        out.is_zero = true;
        return out;
    }
    out.ratio = l2 / l1;
    out.certified = out.ratio <= tol;
    out.w = std::sqrt(l1) * es.eigenvectors().col(n - 1);
    // canonical global phase: largest-modulus entry real and nonnegative
    int imax = 0;
    out.w.cwiseAbs().maxCoeff(&imax);
    const double mag = std::abs(out.w[imax]);
    if (mag > 0.0)
        out.w *= std::conj(out.w[imax]) / mag;
    return out;
}

InnerSdpSolution solve_inner_sdp(const Positions& t, const Eigen::MatrixXd& xi, double rho,
                                 const std::vector<Eigen::VectorXcd>& h, const Eigen::VectorXd& gamma,
                                 double noise_power, double tx_power, double theta_s,
                                 double wavelength, const ConicSettings& settings) {
    if (!(rho > 0.0))
        throw std::invalid_argument("solve_inner_sdp: rho must be > 0");
    const int users = static_cast<int>(h.size());
    const int nt = static_cast<int>(t.size());
    const int ns = hermitian_svec_len(nt);
    const int n = users * ns + users * users + 1; // W blocks, Q, epigraph p
    const int q0 = users * ns;
    const int p_col = q0 + users * users;
    const int soc_dim = users * users + 2;
    const int m = users * ns + 1 + users + soc_dim;

    const Eigen::VectorXcd a = steering_vector(theta_s, t, wavelength);
    const Eigen::VectorXd svec_aa = svec_hermitian(a * a.adjoint());
    std::vector<Eigen::VectorXd> svec_hh(users);
    for (int k = 0; k < users; ++k)
        svec_hh[k] = svec_hermitian(h[k] * h[k].adjoint());

    ConicProblem prob;
    prob.c = Eigen::VectorXd::Zero(n);
    prob.a = Eigen::MatrixXd::Zero(m, n);
    prob.b = Eigen::VectorXd::Zero(m);
    for (int k = 0; k < users; ++k)
        prob.c.segment(block_col(k, ns), ns) = -svec_aa;
    prob.c[p_col] = 1.0;

    int row = 0;
    // PSD membership rows: -I per block
    for (int k = 0; k < users; ++k) {
        for (int j = 0; j < ns; ++j)
            prob.a(row + j, block_col(k, ns) + j) = -1.0;
        prob.cones.push_back({ConeKind::PsdHermitian, nt});
        prob.psd_identity_col.push_back(block_col(k, ns));
        row += ns;
    }
    // total power
    for (int k = 0; k < users; ++k)
        add_trace_row(prob.a, row, block_col(k, ns), nt, 1.0);
    prob.b[row] = tx_power;
    prob.cones.push_back({ConeKind::NonNeg, 1});
    row += 1;
    // per-user Q inequality
    for (int k = 0; k < users; ++k) {
        prob.a(row, q0 + k * users + k) = -1.0;
        for (int i = 0; i < users; ++i)
            if (i != k)
                prob.a(row, q0 + k * users + i) = gamma[k];
        prob.b[row] = -noise_power * gamma[k];
        ++row;
    }
    prob.cones.push_back({ConeKind::NonNeg, users});
    // rotated-cone epigraph of the quadratic penalty, as a standard SOC:
    // (p + rho, p - rho, sqrt(2) (Q - V + rho*xi)) with ||tail|| <= head
    const int soc_row = row;
    prob.a(soc_row, p_col) = -1.0;
    prob.b[soc_row] = rho;
    prob.a(soc_row + 1, p_col) = -1.0;
    prob.b[soc_row + 1] = -rho;
    for (int k = 0; k < users; ++k) {
        for (int i = 0; i < users; ++i) {
            const int r = soc_row + 2 + k * users + i;
            prob.a(r, q0 + k * users + i) = -kSqrt2;
            prob.a.block(r, block_col(i, ns), 1, ns) = kSqrt2 * svec_hh[k].transpose();
            prob.b[r] = kSqrt2 * rho * xi(k, i);
        }
    }
    prob.cones.push_back({ConeKind::Soc, soc_dim});

    const ConicSolution sol = solve_conic(prob, settings);

    InnerSdpSolution out;
    out.status = sol.status;
    out.pres = sol.pres;
    out.dres = sol.dres;
    out.rel_gap = sol.rel_gap;
    out.iterations = sol.iterations;
    if (sol.status == ConicStatus::PrimalInfeasible || sol.status == ConicStatus::DualInfeasible)
        throw std::runtime_error("solve_inner_sdp: solver reported infeasibility on an "
                                 "always-feasible problem (modeling bug)");

    out.w_lifted.resize(users);
    out.w_columns.resize(nt, users);
    out.rank_ratio.resize(users);
    out.rank_certified = true;
    for (int k = 0; k < users; ++k) {
        out.w_lifted[k] = smat_hermitian(sol.x.segment(block_col(k, ns), ns), nt);
        if (std::real(out.w_lifted[k].trace()) <= 1e-7 * tx_power) {
            // an unserved user: the block is zero up to solver roundoff
            out.w_columns.col(k).setZero();
            out.rank_ratio[k] = 0.0;
            continue;
        }
        const RankOneExtraction ex = extract_rank_one(out.w_lifted[k]);
        out.w_columns.col(k) = ex.w;
        out.rank_ratio[k] = ex.ratio;
        out.rank_certified = out.rank_certified && ex.certified;
    }
    out.q.resize(users, users);
    for (int k = 0; k < users; ++k)
        for (int i = 0; i < users; ++i)
            out.q(k, i) = sol.x[q0 + k * users + i];

    // recompute F from (W, Q) so the value is exactly consistent with
    // al_objective_lifted used elsewhere
    const Eigen::MatrixXd v = coupling_v_lifted(h, out.w_lifted);
    double gain = 0.0;
    for (int k = 0; k < users; ++k)
        gain += std::real(a.dot(out.w_lifted[k] * a));
    out.objective = -gain + (out.q - v + rho * xi).squaredNorm() / (2.0 * rho);
    return out;
}

FixedSdpResult solve_fixed_position_sdp(const Positions& t, const std::vector<Eigen::VectorXcd>& h,
                                        const Eigen::VectorXd& gamma, double noise_power,
                                        double tx_power, double theta_s, double wavelength,
                                        const ConicSettings& settings) {
    const int users = static_cast<int>(h.size());
    const int nt = static_cast<int>(t.size());
    const int ns = hermitian_svec_len(nt);
    const int n = users * ns;
    const int m = users * ns + 1 + users;

    const Eigen::VectorXcd a = steering_vector(theta_s, t, wavelength);
    const Eigen::VectorXd svec_aa = svec_hermitian(a * a.adjoint());
    std::vector<Eigen::VectorXd> svec_hh(users);
    for (int k = 0; k < users; ++k)
        svec_hh[k] = svec_hermitian(h[k] * h[k].adjoint());

    ConicProblem prob;
    prob.c = Eigen::VectorXd::Zero(n);
    prob.a = Eigen::MatrixXd::Zero(m, n);
    prob.b = Eigen::VectorXd::Zero(m);
    for (int k = 0; k < users; ++k)
        prob.c.segment(block_col(k, ns), ns) = -svec_aa;

    int row = 0;
    for (int k = 0; k < users; ++k) {
        for (int j = 0; j < ns; ++j)
            prob.a(row + j, block_col(k, ns) + j) = -1.0;
        prob.cones.push_back({ConeKind::PsdHermitian, nt});
        prob.psd_identity_col.push_back(block_col(k, ns));
        row += ns;
    }
    for (int k = 0; k < users; ++k)
        add_trace_row(prob.a, row, block_col(k, ns), nt, 1.0);
    prob.b[row] = tx_power;
    prob.cones.push_back({ConeKind::NonNeg, 1});
    row += 1;
    // lifted SINR rows: h_k^H W_k h_k - Gamma_k sum_{i!=k} h_k^H W_i h_k >= Gamma_k sigma^2
    for (int k = 0; k < users; ++k) {
        for (int i = 0; i < users; ++i) {
            const double coeff = (i == k) ? -1.0 : gamma[k];
            prob.a.block(row, block_col(i, ns), 1, ns) += coeff * svec_hh[k].transpose();
        }
        prob.b[row] = -gamma[k] * noise_power;
        ++row;
    }
    prob.cones.push_back({ConeKind::NonNeg, users});

    const ConicSolution sol = solve_conic(prob, settings);

    FixedSdpResult out;
    out.status = sol.status;
    out.iterations = sol.iterations;
    if (sol.status == ConicStatus::PrimalInfeasible) {
        out.feasible = false;
        return out;
    }
    out.feasible = true;
    out.w_lifted.resize(users);
    out.w_columns.resize(nt, users);
    out.rank_ratio.resize(users);
    out.rank_certified = true;
    for (int k = 0; k < users; ++k) {
        out.w_lifted[k] = smat_hermitian(sol.x.segment(block_col(k, ns), ns), nt);
        if (std::real(out.w_lifted[k].trace()) <= 1e-7 * tx_power) {
            out.w_columns.col(k).setZero();
            out.rank_ratio[k] = 0.0;
            continue;
        }
        const RankOneExtraction ex = extract_rank_one(out.w_lifted[k]);
        out.rank_ratio[k] = ex.ratio;
        out.rank_certified = out.rank_certified && ex.certified;
        if (ex.certified || ex.is_zero) {
            out.w_columns.col(k) = ex.w;
        } else {
            // uncertified lift: the channel-matched extraction
            // w = W h / sqrt(h^H W h) keeps every SINR constraint and the
            // power budget satisfied (w w^H <= W), trading a little gain
            const Eigen::VectorXcd wh = out.w_lifted[k] * h[k];
            const double sig = std::real(h[k].dot(wh));
            out.w_columns.col(k) = sig > 0.0 ? (wh / std::sqrt(sig)).eval() : ex.w;
        }
    }
    // gain of the beamformer actually returned
    out.gain = (a.adjoint() * out.w_columns).squaredNorm();
    return out;
}

} // namespace ma_isac
