// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#include "ma_isac/channel.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace ma_isac {

Eigen::VectorXcd steering_vector(double theta, const Positions& t, double wavelength) {
    const double phase_rate = 2.0 * M_PI * std::sin(theta) / wavelength;
    Eigen::VectorXcd a(t.size());
    for (Eigen::Index p = 0; p < t.size(); ++p)
        a[p] = std::polar(1.0, -phase_rate * t[p]);
    return a;
}

Eigen::VectorXcd synthesize_channel(const PathSet& paths, const Positions& t, double wavelength) {
    if (paths.gains.size() != paths.angles.size())
        throw std::invalid_argument("synthesize_channel: gains/angles size mismatch");
    Eigen::VectorXcd h = Eigen::VectorXcd::Zero(t.size());
    for (std::size_t l = 0; l < paths.gains.size(); ++l)
        h += paths.gains[l] * steering_vector(paths.angles[l], t, wavelength);
    return h;
}

std::vector<Eigen::VectorXcd> synthesize_channels(const std::vector<PathSet>& paths, const Positions& t,
                                                  double wavelength) {
    std::vector<Eigen::VectorXcd> h;
    h.reserve(paths.size());
    for (const auto& p : paths)
        h.push_back(synthesize_channel(p, t, wavelength));
    return h;
}

double sinr(const std::vector<Eigen::VectorXcd>& h, const Beamformer& w, double noise_power, int k) {
    const Eigen::Index users = w.cols();
    const Eigen::VectorXcd& hk = h.at(k);
    double interference = 0.0;
    for (Eigen::Index i = 0; i < users; ++i) {
        if (i == k)
            continue;
        interference += std::norm(hk.dot(w.col(i)));
    }
    const double signal = std::norm(hk.dot(w.col(k)));
    return signal / (interference + noise_power);
}

double beampattern_gain(const Positions& t, const Beamformer& w, double theta, double wavelength) {
    const Eigen::VectorXcd a = steering_vector(theta, t, wavelength);
    return (a.adjoint() * w).squaredNorm();
}

std::vector<double> beampattern_sweep(const Positions& t, const Beamformer& w, double wavelength,
                                      const std::vector<double>& theta_grid) {
    std::vector<double> gains;
    gains.reserve(theta_grid.size());
    for (double theta : theta_grid)
        gains.push_back(beampattern_gain(t, w, theta, wavelength));
    return gains;
}

Eigen::MatrixXd coupling_v(const std::vector<Eigen::VectorXcd>& h, const Beamformer& w) {
    const int users = static_cast<int>(h.size());
    Eigen::MatrixXd v(users, users);
    for (int k = 0; k < users; ++k)
        for (int i = 0; i < users; ++i)
            v(k, i) = std::norm(h[k].dot(w.col(i)));
    return v;
}

Eigen::MatrixXd coupling_v_lifted(const std::vector<Eigen::VectorXcd>& h,
                                  const std::vector<Eigen::MatrixXcd>& w_lifted) {
    const int users = static_cast<int>(h.size());
    Eigen::MatrixXd v(users, static_cast<int>(w_lifted.size()));
    for (int k = 0; k < users; ++k)
        for (std::size_t i = 0; i < w_lifted.size(); ++i)
            v(k, static_cast<int>(i)) = std::real(h[k].dot(w_lifted[i] * h[k]));
    return v;
}

namespace {

double penalty_term(const Eigen::MatrixXd& q, const Eigen::MatrixXd& v, const Eigen::MatrixXd& xi,
                    double rho) {
    return (q - v + rho * xi).squaredNorm() / (2.0 * rho);
}

} // namespace

double al_objective(const Positions& t, const Beamformer& w, const Eigen::MatrixXd& q,
                    const Eigen::MatrixXd& xi, double rho, double theta_s, double wavelength,
                    const std::vector<Eigen::VectorXcd>& h) {
    if (!(rho > 0.0))
        throw std::invalid_argument("al_objective: rho must be > 0");
    const double gain = beampattern_gain(t, w, theta_s, wavelength);
    return -gain + penalty_term(q, coupling_v(h, w), xi, rho);
}

double al_objective_lifted(const Positions& t, const std::vector<Eigen::MatrixXcd>& w_lifted,
                           const Eigen::MatrixXd& q, const Eigen::MatrixXd& xi, double rho,
                           double theta_s, double wavelength, const std::vector<Eigen::VectorXcd>& h) {
    if (!(rho > 0.0))
        throw std::invalid_argument("al_objective_lifted: rho must be > 0");
    const Eigen::VectorXcd a = steering_vector(theta_s, t, wavelength);
    std::complex<double> gain = 0.0;
    for (const auto& wk : w_lifted)
        gain += a.dot(wk * a);
    return -std::real(gain) + penalty_term(q, coupling_v_lifted(h, w_lifted), xi, rho);
}

double violation_inf(const Eigen::MatrixXd& q, const Eigen::MatrixXd& v) {
    if (q.rows() != v.rows() || q.cols() != v.cols())
        throw std::invalid_argument("violation_inf: shape mismatch");
    return (q - v).cwiseAbs().maxCoeff();
}

} // namespace ma_isac
