// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#include "ma_isac/baselines.hpp"

#include "ma_isac/units.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ma_isac {

std::string to_string(Scheme s) {
    switch (s) {
    case Scheme::PddJapb:
        return "pdd";
    case Scheme::FixedUla:
        return "fa";
    case Scheme::RandomMa:
        return "random";
    case Scheme::UpperBound:
        return "bound";
    }
    return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "pdd")
        return Scheme::PddJapb;
    if (name == "fa")
        return Scheme::FixedUla;
    if (name == "random")
        return Scheme::RandomMa;
    if (name == "bound")
        return Scheme::UpperBound;
    throw std::invalid_argument("unknown scheme '" + name + "' (expected pdd|fa|random|bound)");
}

namespace {

PddResult fixed_position_record(const ScenarioConfig& cfg, const std::vector<PathSet>& paths,
                                const Positions& t) {
    const auto t_start = std::chrono::steady_clock::now();
    const std::vector<PathSet> normalized = normalize_by_noise(paths, cfg.noise_power);
    const std::vector<Eigen::VectorXcd> h = synthesize_channels(normalized, t, cfg.wavelength);
    Eigen::VectorXd gamma(cfg.num_users);
    for (int k = 0; k < cfg.num_users; ++k)
        gamma[k] = cfg.sinr_targets[k];

    ConicSettings settings;
    // 10x headroom: core tolerances act on the equilibrated problem
    settings.feas_tol = cfg.sdp_tol * 0.1;
    settings.rel_gap_tol = cfg.sdp_tol * 0.1;

    PddResult r;
    r.t = t;
    const FixedSdpResult sdp = solve_fixed_position_sdp(t, h, gamma, 1.0, cfg.tx_power,
                                                        cfg.target_angle, cfg.wavelength, settings);
    r.polish_status = sdp.status;
    r.rank_certified_all = sdp.rank_certified;
    if (!sdp.feasible) {
        r.feasible = false;
        r.verdict = "infeasible SINR targets at this geometry";
        r.w_columns = Eigen::MatrixXcd::Zero(cfg.num_antennas, cfg.num_users);
        r.gain = 0.0;
        r.gain_db_over_pt = -std::numeric_limits<double>::infinity();
        r.sinr_db = Eigen::VectorXd::Constant(cfg.num_users, -std::numeric_limits<double>::infinity());
        r.sinr_slack_db = r.sinr_db;
    } else {
        r.w_columns = sdp.w_columns;
        r.gain = beampattern_gain(t, r.w_columns, cfg.target_angle, cfg.wavelength);
        r.gain_db_over_pt = linear_to_db(std::max(r.gain, 1e-300) / cfg.tx_power);
        r.sinr_slack_db = audit_feasibility(r.w_columns, h, 1.0, gamma);
        r.sinr_db.resize(cfg.num_users);
        for (int k = 0; k < cfg.num_users; ++k) {
            const double s = sinr(h, r.w_columns, 1.0, k);
            r.sinr_db[k] = s > 0.0 ? linear_to_db(s) : -std::numeric_limits<double>::infinity();
        }
        r.feasible = (r.sinr_slack_db.array() >= -0.01).all();
        r.verdict = r.feasible ? "feasible" : "polished solution violates SINR audit";
    }
    r.converged = true;
    const auto t_end = std::chrono::steady_clock::now();
    r.wall_ms = std::chrono::duration<double, std::milli>(t_end - t_start).count();
    return r;
}

} // namespace

PddResult run_baseline(Scheme scheme, const ScenarioConfig& cfg, std::uint64_t realization,
                       const BaselineOptions& options) {
    if (scheme == Scheme::UpperBound) {
        PddResult r;
        r.gain = static_cast<double>(cfg.num_antennas) * cfg.tx_power;
        r.gain_db_over_pt = linear_to_db(static_cast<double>(cfg.num_antennas));
        r.feasible = true;
        r.converged = true;
        r.verdict = "analytic bound";
        r.w_columns = Eigen::MatrixXcd::Zero(cfg.num_antennas, cfg.num_users);
        r.polish_status = ConicStatus::Optimal;
        return r;
    }

    const std::vector<PathSet> paths = draw_scenario(cfg, realization);
    switch (scheme) {
    case Scheme::FixedUla: {
        Positions t = initial_positions(cfg.num_antennas, cfg.aperture, cfg.wavelength,
                                        InitScheme::UlaCompact);
        if (options.fa_center) {
            const double shift = (cfg.aperture - (cfg.num_antennas - 1) * cfg.wavelength / 2.0) / 2.0;
            t.array() += shift;
        }
        return fixed_position_record(cfg, paths, t);
    }
    case Scheme::RandomMa: {
        Rng rng = Rng::from_stream(cfg.master_seed, realization, 1); // purpose tag 1 = positions
        const Positions t =
            sample_random_positions(rng, cfg.num_antennas, cfg.aperture, cfg.wavelength);
        return fixed_position_record(cfg, paths, t);
    }
    case Scheme::PddJapb:
        return run_pdd(cfg, paths, options.pdd);
    case Scheme::UpperBound:
        break;
    }
    throw std::logic_error("run_baseline: unreachable");
}

} // namespace ma_isac
