// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace ma_isac::testing {

namespace {

// project {M_k} onto { W_k psd, sum tr(W_k) <= budget } in Frobenius norm:
// eigenvalues are shifted by a common multiplier found by bisection
std::vector<Eigen::MatrixXcd> project_psd_trace(const std::vector<Eigen::MatrixXcd>& m,
                                                double budget) {
    std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>> eigs;
    eigs.reserve(m.size());
    double trace_at_zero = 0.0;
    double max_eig = 0.0;
    for (const auto& mk : m) {
        eigs.emplace_back((mk + mk.adjoint()) / 2.0);
        trace_at_zero += eigs.back().eigenvalues().cwiseMax(0.0).sum();
        max_eig = std::max(max_eig, eigs.back().eigenvalues().maxCoeff());
    }
    double nu = 0.0;
    if (trace_at_zero > budget) {
        double lo = 0.0, hi = max_eig;
        for (int it = 0; it < 200; ++it) {
            nu = (lo + hi) / 2.0;
            double tr = 0.0;
            for (const auto& e : eigs)
                tr += (e.eigenvalues().array() - nu).max(0.0).sum();
            if (tr > budget)
                lo = nu;
            else
                hi = nu;
        }
        nu = hi;
    }
    std::vector<Eigen::MatrixXcd> out;
    out.reserve(m.size());
    for (const auto& e : eigs) {
        const Eigen::VectorXd lam = (e.eigenvalues().array() - nu).max(0.0);
        out.push_back(e.eigenvectors() * lam.asDiagonal() * e.eigenvectors().adjoint());
    }
    return out;
}

} // namespace

Eigen::VectorXd project_q_row(const Eigen::VectorXd& row, int k, double gamma, double rhs) {
    const int users = static_cast<int>(row.size());
    Eigen::VectorXd normal = Eigen::VectorXd::Constant(users, -gamma);
    normal[k] = 1.0;
    const double slack = rhs - normal.dot(row);
    if (slack <= 0.0)
        return row;
    return row + (slack / normal.squaredNorm()) * normal;
}

FistaResult fista_inner_sdp(const Positions& t, const Eigen::MatrixXd& xi, double rho,
                            const std::vector<Eigen::VectorXcd>& h, const Eigen::VectorXd& gamma,
                            double noise_power, double tx_power, double theta_s, double wavelength,
                            int max_iters, double tol) {
    const int users = static_cast<int>(h.size());
    const int nt = static_cast<int>(t.size());
    const Eigen::VectorXcd a = steering_vector(theta_s, t, wavelength);
    const Eigen::MatrixXcd aa = a * a.adjoint();
    std::vector<Eigen::MatrixXcd> hh(users);
    for (int k = 0; k < users; ++k)
        hh[k] = h[k] * h[k].adjoint();

    auto objective = [&](const std::vector<Eigen::MatrixXcd>& w, const Eigen::MatrixXd& q) {
        double gain = 0.0;
        Eigen::MatrixXd v(users, users);
        for (int i = 0; i < users; ++i) {
            gain += std::real(a.dot(w[i] * a));
            for (int k = 0; k < users; ++k)
                v(k, i) = std::real(h[k].dot(w[i] * h[k]));
        }
        return -gain + (q - v + rho * xi).squaredNorm() / (2.0 * rho);
    };

    auto gradient = [&](const std::vector<Eigen::MatrixXcd>& w, const Eigen::MatrixXd& q,
                        std::vector<Eigen::MatrixXcd>& gw, Eigen::MatrixXd& gq) {
        Eigen::MatrixXd v(users, users);
        for (int i = 0; i < users; ++i)
            for (int k = 0; k < users; ++k)
                v(k, i) = std::real(h[k].dot(w[i] * h[k]));
        const Eigen::MatrixXd resid = q - v + rho * xi;
        gq = resid / rho;
        for (int i = 0; i < users; ++i) {
            gw[i] = -aa;
            for (int k = 0; k < users; ++k)
                gw[i] -= (resid(k, i) / rho) * hh[k];
        }
    };

    auto project = [&](std::vector<Eigen::MatrixXcd>& w, Eigen::MatrixXd& q) {
        w = project_psd_trace(w, tx_power);
        for (int k = 0; k < users; ++k)
            q.row(k) =
                project_q_row(q.row(k).transpose(), k, gamma[k], noise_power * gamma[k]).transpose();
    };

    std::vector<Eigen::MatrixXcd> w(users, Eigen::MatrixXcd::Zero(nt, nt));
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(users, users);
    project(w, q);
    std::vector<Eigen::MatrixXcd> w_prev = w;
    Eigen::MatrixXd q_prev = q;
    double theta_prev = 1.0;
    double step = rho / (1.0 + rho); // refined by backtracking
    double f_prev = objective(w, q);

    std::vector<Eigen::MatrixXcd> gw(users);
    Eigen::MatrixXd gq(users, users);
    FistaResult out;
    int calm = 0;
    for (int it = 0; it < max_iters; ++it) {
        const double theta = (1.0 + std::sqrt(1.0 + 4.0 * theta_prev * theta_prev)) / 2.0;
        const double beta = (theta_prev - 1.0) / theta;
        std::vector<Eigen::MatrixXcd> y(users);
        for (int i = 0; i < users; ++i)
            y[i] = w[i] + beta * (w[i] - w_prev[i]);
        Eigen::MatrixXd yq = q + beta * (q - q_prev);
        gradient(y, yq, gw, gq);
        const double fy = objective(y, yq);

        // backtracking on the smooth majorization
        std::vector<Eigen::MatrixXcd> w_new(users);
        Eigen::MatrixXd q_new;
        for (int bt = 0; bt < 60; ++bt) {
            for (int i = 0; i < users; ++i)
                w_new[i] = y[i] - step * gw[i];
            q_new = yq - step * gq;
            project(w_new, q_new);
            double lin = fy;
            double dist = 0.0;
            for (int i = 0; i < users; ++i) {
                lin += std::real((gw[i].adjoint() * (w_new[i] - y[i])).trace());
                dist += (w_new[i] - y[i]).squaredNorm();
            }
            lin += (gq.array() * (q_new - yq).array()).sum();
            dist += (q_new - yq).squaredNorm();
            if (objective(w_new, q_new) <= lin + dist / (2.0 * step) + 1e-14)
                break;
            step *= 0.5;
        }
        w_prev = std::move(w);
        q_prev = q;
        w = std::move(w_new);
        q = std::move(q_new);
        theta_prev = theta;
        const double f = objective(w, q);
        out.iterations = it + 1;
        if (std::abs(f - f_prev) <= tol * std::max(1.0, std::abs(f))) {
            if (++calm >= 20 && it > 100)
                break;
        } else {
            calm = 0;
        }
        f_prev = f;
    }
    out.w = w;
    out.q = q;
    out.objective = objective(w, q);
    return out;
}

double single_user_optimal_gain(const Eigen::VectorXcd& a, const Eigen::VectorXcd& h,
                                double threshold, double power) {
    const double hn2 = h.squaredNorm();
    if (threshold > power * hn2 + 1e-15)
        return -1.0;
    if (threshold <= 0.0)
        return power * a.squaredNorm();
    const double r_min = std::sqrt(threshold / hn2);
    const Eigen::VectorXcd u1 = h / std::sqrt(hn2);
    const std::complex<double> a1c = u1.dot(a); // u1^H a
    Eigen::VectorXcd a_perp = a - u1 * a1c;
    const double a2 = a_perp.norm();
    const double a1 = std::abs(a1c);
    // maximize (a1 r1 + a2 r2)^2 over r1 >= r_min, r1^2 + r2^2 <= power
    const double norm_a = std::sqrt(a1 * a1 + a2 * a2);
    const double r1_mrt = std::sqrt(power) * a1 / norm_a;
    if (r1_mrt >= r_min)
        return power * a.squaredNorm();
    const double r2 = std::sqrt(std::max(0.0, power - r_min * r_min));
    const double amp = a1 * r_min + a2 * r2;
    return amp * amp;
}

} // namespace ma_isac::testing
