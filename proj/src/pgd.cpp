// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#include "ma_isac/pgd.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace ma_isac {

Eigen::VectorXd gradient_positions(const Positions& t, const std::vector<Eigen::MatrixXcd>& w_lifted,
                                   const Eigen::MatrixXd& q, const Eigen::MatrixXd& xi, double rho,
                                   const std::vector<PathSet>& paths, double theta_s,
                                   double wavelength) {
    if (!(rho > 0.0))
        throw std::invalid_argument("gradient_positions: rho must be > 0");
    const int nt = static_cast<int>(t.size());
    const int users = static_cast<int>(paths.size());
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(nt);

    // beampattern term: d/dt_p of -a^H R_x a with R_x = sum_k W_k
    const Eigen::VectorXcd a = steering_vector(theta_s, t, wavelength);
    Eigen::MatrixXcd rx = Eigen::MatrixXcd::Zero(nt, nt);
    for (const auto& wk : w_lifted)
        rx += wk;
    const Eigen::VectorXcd rxa = rx * a;
    const double kappa_s = 4.0 * M_PI * std::sin(theta_s) / wavelength;
    for (int p = 0; p < nt; ++p)
        grad[p] += kappa_s * std::imag(std::conj(a[p]) * rxa[p]);

    // penalty term through B_{ki} = h_k^H W_i h_k
    for (int k = 0; k < users; ++k) {
        const PathSet& ps = paths[k];
        const Eigen::VectorXcd hk = synthesize_channel(ps, t, wavelength);
        // entrywise derivative of h_k with respect to its own position
        Eigen::VectorXcd hk_prime = Eigen::VectorXcd::Zero(nt);
        for (std::size_t l = 0; l < ps.gains.size(); ++l) {
            const double kap = 2.0 * M_PI * std::sin(ps.angles[l]) / wavelength;
            const std::complex<double> factor = ps.gains[l] * std::complex<double>(0.0, -kap);
            for (int p = 0; p < nt; ++p)
                hk_prime[p] += factor * std::polar(1.0, -kap * t[p]);
        }
        for (int i = 0; i < users; ++i) {
            const Eigen::VectorXcd wh = w_lifted[i] * hk;
            const double b_ki = std::real(hk.dot(wh));
            const double resid = b_ki - (q(k, i) + rho * xi(k, i));
            const double scale = resid / rho;
            for (int p = 0; p < nt; ++p)
                grad[p] += scale * 2.0 * std::real(std::conj(hk_prime[p]) * wh[p]);
        }
    }
    return grad;
}

std::pair<Positions, PgdTrace> run_pgd(const Positions& t0,
                                       const std::vector<Eigen::MatrixXcd>& w_lifted,
                                       const Eigen::MatrixXd& q, const Eigen::MatrixXd& xi,
                                       double rho, const std::vector<PathSet>& paths, double theta_s,
                                       double wavelength, double aperture, const PgdKnobs& knobs) {
    Positions t = t0;
    PgdTrace trace;
    auto objective = [&](const Positions& tt) {
        return al_objective_lifted(tt, w_lifted, q, xi, rho, theta_s, wavelength,
                                   synthesize_channels(paths, tt, wavelength));
    };
    double f = objective(t);
    trace.f_values.push_back(f);

    double step0 = knobs.step0;
    if (!(step0 > 0.0)) {
        const double g0 = gradient_positions(t, w_lifted, q, xi, rho, paths, theta_s, wavelength).norm();
        step0 = 0.1 * wavelength / (g0 + 1e-30);
    }

    for (int d = 0; d < knobs.max_iters; ++d) {
        const Eigen::VectorXd g = gradient_positions(t, w_lifted, q, xi, rho, paths, theta_s, wavelength);
        const double gn2 = g.squaredNorm();
        if (gn2 == 0.0) {
            trace.reason = PgdStop::ZeroGradient;
            trace.iterations = d + 1;
            return {t, trace};
        }
        double gamma = step0;
        bool accepted = false;
        Positions t_next;
        double f_next = 0.0;
        for (int bt = 0; bt < knobs.max_backtracks; ++bt) {
            t_next = project_positions(t - gamma * g, aperture, wavelength);
            f_next = objective(t_next);
            if (f_next <= f - knobs.armijo_c * gamma * gn2) {
                accepted = true;
                break;
            }
            gamma *= knobs.shrink;
        }
        if (!accepted) {
            trace.reason = PgdStop::StepRejected;
            trace.iterations = d + 1;
            return {t, trace};
        }
        const double move = (t_next - t).cwiseAbs().maxCoeff();
        t = t_next;
        f = f_next;
        trace.f_values.push_back(f);
        trace.steps.push_back(gamma);
        trace.grad_norms_sq.push_back(gn2);
        trace.iterations = d + 1;
        if (move < 1e-6 * wavelength) {
            trace.reason = PgdStop::Converged;
            return {t, trace};
        }
    }
    trace.reason = PgdStop::MaxIters;
    return {t, trace};
}

} // namespace ma_isac
