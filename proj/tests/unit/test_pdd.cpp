// SPDX-License-Identifier: Apache-2.0
#include "ma_isac/pdd.hpp"

#include "ma_isac/baselines.hpp"
#include "ma_isac/units.hpp"

#include <doctest.h>

#include <cmath>

using namespace ma_isac;

namespace {

ScenarioConfig desk_config(int users, int antennas, double gamma_db) {
    ScenarioConfig cfg;
    cfg.num_users = users;
    cfg.num_antennas = antennas;
    cfg.sinr_targets.assign(users, db_to_linear(gamma_db));
    cfg.master_seed = 11;
    cfg.validate();
    return cfg;
}

// first realization index whose compact-ULA system is SINR-feasible
std::uint64_t first_feasible_realization(const ScenarioConfig& cfg) {
    const Positions ula =
        initial_positions(cfg.num_antennas, cfg.aperture, cfg.wavelength, InitScheme::UlaCompact);
    Eigen::VectorXd gamma(cfg.num_users);
    for (int k = 0; k < cfg.num_users; ++k)
        gamma[k] = cfg.sinr_targets[k];
    for (std::uint64_t r = 0;; ++r) {
        const auto paths = normalize_by_noise(draw_scenario(cfg, r), cfg.noise_power);
        const auto h = synthesize_channels(paths, ula, cfg.wavelength);
        if (solve_fixed_position_sdp(ula, h, gamma, 1.0, cfg.tx_power, cfg.target_angle,
                                     cfg.wavelength)
                .feasible)
            return r;
    }
}

} // namespace

TEST_CASE("inner bcd pass count follows max_inner and the fixed-point test") {
    ScenarioConfig cfg = desk_config(2, 4, 6.0);
    const auto paths = normalize_by_noise(draw_scenario(cfg, 0), cfg.noise_power);

    // max_inner = 1: exactly one SDP + PGD pass
    cfg.pdd.max_inner = 1;
    PddState s1;
    s1.t = project_positions(
        initial_positions(4, cfg.aperture, cfg.wavelength, InitScheme::UniformSpread),
        cfg.aperture, cfg.wavelength);
    s1.xi = Eigen::MatrixXd::Zero(2, 2);
    s1 = run_inner_bcd(std::move(s1), cfg, paths, true, nullptr);
    CHECK(s1.inner_iters_total == 1);
    CHECK(s1.f_history.size() == 1);

    // fixed-t mode: block optimum is a fixed point, stops at i = 2
    cfg.pdd.max_inner = 15;
    PddState s2;
    s2.t = s1.t;
    s2.xi = Eigen::MatrixXd::Zero(2, 2);
    s2 = run_inner_bcd(std::move(s2), cfg, paths, false, nullptr);
    CHECK(s2.inner_iters_total == 2);
    REQUIRE(s2.f_history.size() == 2);
    CHECK(s2.f_history[1] ==
          doctest::Approx(s2.f_history[0]).epsilon(1e-6));
}

TEST_CASE("inner bcd objective history is non-increasing") {
    ScenarioConfig cfg = desk_config(3, 6, 8.0);
    const auto paths = normalize_by_noise(draw_scenario(cfg, 1), cfg.noise_power);
    PddState state;
    state.t = project_positions(
        initial_positions(6, cfg.aperture, cfg.wavelength, InitScheme::UniformSpread),
        cfg.aperture, cfg.wavelength);
    state.xi = Eigen::MatrixXd::Zero(3, 3);
    state = run_inner_bcd(std::move(state), cfg, paths, true, nullptr);
    REQUIRE(state.f_history.size() >= 2);
    for (std::size_t i = 1; i < state.f_history.size(); ++i)
        CHECK(state.f_history[i] <= state.f_history[i - 1] + 1e-6 * std::abs(state.f_history[i - 1]));
}

TEST_CASE("run_pdd converges on a feasible instance and honors invariants") {
    ScenarioConfig cfg = desk_config(4, 8, 10.0);
    const std::uint64_t r = first_feasible_realization(cfg);
    const auto paths = draw_scenario(cfg, r);
    PddOptions opt;
    opt.collect_trace = true;
    const PddResult res = run_pdd(cfg, paths, opt);
    CHECK(res.converged);
    CHECK(res.feasible);
    CHECK(res.final_violation < cfg.pdd.delta_out);
    CHECK(res.outer_iters <= cfg.pdd.max_outer);
    CHECK((res.sinr_slack_db.array() >= -0.01).all());
    CHECK(is_feasible(res.t, cfg.aperture, cfg.wavelength));
    // rho follows rho0 * c0^j exactly in the trace
    for (const auto& row : res.trace)
        CHECK(row.rho == cfg.pdd.rho0 * std::pow(cfg.pdd.c0, row.outer));
    // violation recorded once per outer iteration
    CHECK(static_cast<int>(res.violation_history.size()) == res.outer_iters);
}

TEST_CASE("audit sentinels: zero beamformer, vacuous target, threshold case") {
    const double lambda = 0.1;
    Positions t(3);
    t << 0.0, 0.25, 0.6;
    Rng rng(41);
    std::vector<Eigen::VectorXcd> h;
    PathSet ps;
    ps.gains = {std::complex<double>(2.0, 1.0)};
    ps.angles = {0.3};
    h.push_back(synthesize_channel(ps, t, lambda));

    const Beamformer zero = Beamformer::Zero(3, 1);
    Eigen::VectorXd gamma = Eigen::VectorXd::Constant(1, 10.0);
    const Eigen::VectorXd s1 = audit_feasibility(zero, h, 1.0, gamma);
    CHECK(std::isinf(s1[0]));
    CHECK(s1[0] < 0);

    Eigen::VectorXd vacuous = Eigen::VectorXd::Constant(1, 0.0);
    const Eigen::VectorXd s2 = audit_feasibility(zero, h, 1.0, vacuous);
    CHECK(std::isinf(s2[0]));
    CHECK(s2[0] > 0);

    // single-user MRT at its threshold: slack 0 within 1e-3 dB
    Beamformer mrt(3, 1);
    mrt.col(0) = h[0] / h[0].norm();
    const double achieved = sinr(h, mrt, 1.0, 0);
    Eigen::VectorXd at = Eigen::VectorXd::Constant(1, achieved);
    const Eigen::VectorXd s3 = audit_feasibility(mrt, h, 1.0, at);
    CHECK(std::abs(s3[0]) <= 1e-3);
}

TEST_CASE("pdd with pgd disabled at the compact ULA collapses to the FA baseline") {
    ScenarioConfig cfg = desk_config(3, 6, 8.0);
    const std::uint64_t r = first_feasible_realization(cfg);
    const auto paths = draw_scenario(cfg, r);

    PddOptions opt;
    opt.enable_pgd = false;
    opt.init = InitScheme::UlaCompact;
    opt.probe_draws = 0;
    const PddResult pdd = run_pdd(cfg, paths, opt);

    BaselineOptions bo;
    const PddResult fa = run_baseline(Scheme::FixedUla, cfg, r, bo);
    REQUIRE(fa.feasible);
    REQUIRE(pdd.feasible);
    CHECK(pdd.gain == doctest::Approx(fa.gain).epsilon(1e-4));
}

TEST_CASE("pdd from the compact ULA never falls below the FA baseline") {
    ScenarioConfig cfg = desk_config(3, 6, 8.0);
    for (std::uint64_t seed : {3, 4, 5}) {
        cfg.master_seed = seed;
        const std::uint64_t r = first_feasible_realization(cfg);
        const auto paths = draw_scenario(cfg, r);
        PddOptions opt;
        opt.init = InitScheme::UlaCompact;
        opt.probe_draws = 0;
        const PddResult pdd = run_pdd(cfg, paths, opt);
        BaselineOptions bo;
        const PddResult fa = run_baseline(Scheme::FixedUla, cfg, r, bo);
        REQUIRE(fa.feasible);
        CHECK(pdd.gain >= fa.gain - 1e-6 * std::max(1.0, fa.gain));
    }
}

TEST_CASE("vacuous targets make every geometry reach the upper bound") {
    ScenarioConfig cfg = desk_config(2, 4, 10.0);
    cfg.sinr_targets.assign(2, 0.0); // gamma = 0: constraints vacuous
    cfg.validate();
    const auto paths = draw_scenario(cfg, 2);
    PddOptions opt;
    const PddResult pdd = run_pdd(cfg, paths, opt);
    BaselineOptions bo;
    const PddResult fa = run_baseline(Scheme::FixedUla, cfg, 2, bo);
    CHECK(pdd.gain >= fa.gain - 1e-6 * std::max(1.0, fa.gain));
    CHECK(pdd.gain_db_over_pt == doctest::Approx(linear_to_db(4.0)).epsilon(1e-6));
}
