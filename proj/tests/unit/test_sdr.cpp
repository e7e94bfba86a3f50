// SPDX-License-Identifier: Apache-2.0
#include "ma_isac/sdr.hpp"

#include "ma_isac/scenario.hpp"
#include "ma_isac/units.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace ma_isac;

namespace {

std::vector<Eigen::VectorXcd> random_channels(Rng& rng, int users, const Positions& t,
                                              double wavelength, int paths = 6) {
    std::vector<PathSet> ps(users);
    for (auto& p : ps) {
        p.distance = 100.0;
        for (int l = 0; l < paths; ++l) {
            p.angles.push_back(rng.uniform(-M_PI / 2, M_PI / 2));
            p.gains.push_back(rng.cnormal(2.0));
        }
    }
    return synthesize_channels(ps, t, wavelength);
}

} // namespace

TEST_CASE("extract_rank_one recovers rank-one matrices up to phase") {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXcd v(5);
        for (int i = 0; i < 5; ++i)
            v[i] = rng.cnormal(1.0);
        const Eigen::MatrixXcd w = v * v.adjoint();
        const RankOneExtraction ex = extract_rank_one(w);
        CHECK(ex.certified);
        CHECK_FALSE(ex.is_zero);
        CHECK(ex.ratio <= 1e-12);
        CHECK((ex.w * ex.w.adjoint() - w).cwiseAbs().maxCoeff() <= 1e-9 * v.squaredNorm());
        // canonical phase: largest-modulus entry is real nonnegative
        int imax = 0;
        ex.w.cwiseAbs().maxCoeff(&imax);
        CHECK(ex.w[imax].imag() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(ex.w[imax].real() >= 0.0);
    }

    // identity: certificate must flag
    const RankOneExtraction id = extract_rank_one(Eigen::MatrixXcd::Identity(4, 4));
    CHECK_FALSE(id.certified);
    CHECK(id.ratio == doctest::Approx(1.0));

    // zero matrix: zero vector with flag
    const RankOneExtraction z = extract_rank_one(Eigen::MatrixXcd::Zero(4, 4));
    CHECK(z.is_zero);
    CHECK(z.w.norm() == 0.0);
}

TEST_CASE("inner sdp with negligible penalty reaches the beampattern optimum") {
    Rng rng(22);
    const double lambda = 0.1;
    Positions t(4);
    t << 0.0, 0.35, 0.8, 1.4;
    const auto h = random_channels(rng, 1, t, lambda);
    const Eigen::VectorXd gamma = Eigen::VectorXd::Constant(1, 10.0);
    const Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(1, 1);
    const double pt = 2.0;
    const InnerSdpSolution sol =
        solve_inner_sdp(t, xi, 1e6, h, gamma, 1.0, pt, 0.3, lambda);
    // rho = 1e6 stretches the data scale: accept on surfaced residuals
    CHECK(sol.pres <= 1e-6);
    CHECK(sol.dres <= 1e-6);
    CHECK(sol.rel_gap <= 1e-6);
    // objective ~ -N_t * P_t; W ~ P_t a a^H / N_t
    CHECK(sol.objective == doctest::Approx(-4.0 * pt).epsilon(1e-4));
    const Eigen::VectorXcd a = steering_vector(0.3, t, lambda);
    const Eigen::MatrixXcd expected = pt * (a * a.adjoint()) / 4.0;
    CHECK((sol.w_lifted[0] - expected).cwiseAbs().maxCoeff() <= 1e-3 * pt);
    CHECK(sol.rank_certified);
}

TEST_CASE("inner sdp with zero power: Q solves the row projection") {
    // with P_t = 0 all W vanish and Q minimizes ||Q||^2 under the row
    // constraints; expected values come from the analytic halfspace projection
    Rng rng(23);
    const double lambda = 0.1;
    Positions t(3);
    t << 0.0, 0.2, 0.55;
    const auto h = random_channels(rng, 2, t, lambda);
    const Eigen::VectorXd gamma = Eigen::VectorXd::Constant(2, 4.0);
    const Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(2, 2);
    const InnerSdpSolution sol = solve_inner_sdp(t, xi, 0.7, h, gamma, 1.0, 0.0, 0.0, lambda);
    Eigen::MatrixXd q_expected(2, 2);
    for (int k = 0; k < 2; ++k)
        q_expected.row(k) =
            ma_isac::testing::project_q_row(Eigen::VectorXd::Zero(2), k, 4.0, 4.0).transpose();
    for (const auto& w : sol.w_lifted)
        CHECK(w.cwiseAbs().maxCoeff() <= 1e-5);
    CHECK((sol.q - q_expected).cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("inner sdp objective matches the FISTA second solver") {
    Rng rng(24);
    const double lambda = 0.1;
    Positions t(3);
    t << 0.05, 0.4, 0.9;
    for (int trial = 0; trial < 4; ++trial) {
        const auto h = random_channels(rng, 2, t, lambda, 4);
        Eigen::VectorXd gamma(2);
        gamma << db_to_linear(rng.uniform(2.0, 10.0)), db_to_linear(rng.uniform(2.0, 10.0));
        Eigen::MatrixXd xi(2, 2);
        for (int i = 0; i < 4; ++i)
            xi(i / 2, i % 2) = rng.uniform(-0.5, 0.5);
        const double rho = std::pow(10.0, rng.uniform(-1.5, 0.0));
        const InnerSdpSolution sol = solve_inner_sdp(t, xi, rho, h, gamma, 1.0, 1.5, 0.2, lambda);
        REQUIRE(sol.status == ConicStatus::Optimal);
        const auto ref = ma_isac::testing::fista_inner_sdp(t, xi, rho, h, gamma, 1.0, 1.5, 0.2,
                                                           lambda, 60000, 1e-12);
        CHECK(sol.objective ==
              doctest::Approx(ref.objective).epsilon(1e-5));
    }
}

TEST_CASE("inner sdp solutions satisfy the modeled constraints") {
    Rng rng(25);
    const double lambda = 0.1;
    Positions t(4);
    t << 0.0, 0.3, 0.75, 1.35;
    for (int trial = 0; trial < 5; ++trial) {
        const auto h = random_channels(rng, 3, t, lambda);
        const Eigen::VectorXd gamma = Eigen::VectorXd::Constant(3, db_to_linear(8.0));
        Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(3, 3);
        const double pt = 1.0;
        const InnerSdpSolution sol = solve_inner_sdp(t, xi, 0.5, h, gamma, 1.0, pt, 0.0, lambda);
        REQUIRE(sol.status == ConicStatus::Optimal);
        double trace_sum = 0.0;
        for (const auto& w : sol.w_lifted) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(w, Eigen::EigenvaluesOnly);
            CHECK(es.eigenvalues().minCoeff() >= -1e-8 * std::max(1.0, std::real(w.trace())));
            trace_sum += std::real(w.trace());
        }
        CHECK(trace_sum <= pt * (1.0 + 1e-6));
        for (int k = 0; k < 3; ++k) {
            double row = sol.q(k, k) - gamma[k];
            for (int i = 0; i < 3; ++i)
                if (i != k)
                    row -= gamma[k] * sol.q(k, i);
            CHECK(row >= -1e-6);
        }
        // re-lifting the certified extraction barely moves the objective
        if (sol.rank_certified) {
            std::vector<Eigen::MatrixXcd> relift;
            for (int k = 0; k < 3; ++k)
                relift.push_back(sol.w_columns.col(k) * sol.w_columns.col(k).adjoint());
            const Eigen::MatrixXd v = coupling_v_lifted(h, relift);
            const Eigen::VectorXcd a = steering_vector(0.0, t, lambda);
            double gain = 0.0;
            for (const auto& w : relift)
                gain += std::real(a.dot(w * a));
            const double f2 = -gain + (sol.q - v).squaredNorm() / (2.0 * 0.5);
            CHECK(f2 == doctest::Approx(sol.objective).epsilon(1e-4));
        }
    }
}

TEST_CASE("fixed-position sdp: MRT limit, threshold tightness and infeasibility") {
    Rng rng(26);
    const double lambda = 0.1;
    Positions t(5);
    t << 0.0, 0.3, 0.6, 1.0, 1.45;
    const auto h = random_channels(rng, 1, t, lambda);
    const double pt = 1.7;
    const Eigen::VectorXcd a = steering_vector(0.4, t, lambda);

    // tiny target: matched filter, gain N_t P_t
    Eigen::VectorXd tiny = Eigen::VectorXd::Constant(1, 1e-9);
    const FixedSdpResult mrt = solve_fixed_position_sdp(t, h, tiny, 1.0, pt, 0.4, lambda);
    REQUIRE(mrt.feasible);
    CHECK(mrt.gain == doctest::Approx(5.0 * pt).epsilon(1e-6));

    // target at the MRT threshold: same solution, constraint tight
    const double sinr_mrt = pt * std::norm(h[0].dot(a)) / (a.squaredNorm() * 1.0);
    Eigen::VectorXd at_threshold = Eigen::VectorXd::Constant(1, sinr_mrt);
    const FixedSdpResult th = solve_fixed_position_sdp(t, h, at_threshold, 1.0, pt, 0.4, lambda);
    REQUIRE(th.feasible);
    CHECK(th.gain == doctest::Approx(5.0 * pt).epsilon(1e-5));
    const double achieved = std::norm(h[0].dot(th.w_columns.col(0)));
    CHECK(achieved >= sinr_mrt * (1.0 - 1e-5));

    // matches the closed-form oracle at an in-between target
    const double mid = sinr_mrt * 4.0;
    Eigen::VectorXd gm = Eigen::VectorXd::Constant(1, mid);
    const FixedSdpResult fx = solve_fixed_position_sdp(t, h, gm, 1.0, pt, 0.4, lambda);
    REQUIRE(fx.feasible);
    const double oracle = ma_isac::testing::single_user_optimal_gain(a, h[0], mid, pt);
    CHECK(fx.gain == doctest::Approx(oracle).epsilon(1e-5));

    // unreachable target
    Eigen::VectorXd huge = Eigen::VectorXd::Constant(1, 1e4 * h[0].squaredNorm() * pt);
    const FixedSdpResult inf = solve_fixed_position_sdp(t, h, huge, 1.0, pt, 0.4, lambda);
    CHECK_FALSE(inf.feasible);
    CHECK(inf.status == ConicStatus::PrimalInfeasible);
}

TEST_CASE("theorem 1 rank-one certificate on a batch of inner solves") {
    Rng rng(27);
    const double lambda = 0.1;
    int certified = 0, total = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const int users = 2 + (trial % 3);
        Positions t(4);
        t << 0.0, 0.4 + 0.01 * trial, 0.9, 1.5;
        const auto h = random_channels(rng, users, t, lambda);
        const Eigen::VectorXd gamma = Eigen::VectorXd::Constant(users, db_to_linear(10.0));
        Eigen::MatrixXd xi(users, users);
        for (int i = 0; i < users * users; ++i)
            xi(i / users, i % users) = rng.uniform(-0.2, 0.2);
        const InnerSdpSolution sol =
            solve_inner_sdp(t, xi, 0.6, h, gamma, 1.0, 1.0, 0.0, lambda);
        REQUIRE(sol.status == ConicStatus::Optimal);
        for (int k = 0; k < users; ++k) {
            ++total;
            if (sol.rank_ratio[k] <= 1e-6)
                ++certified;
        }
    }
    CHECK(certified == total);
}
