// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#include "ma_isac/pdd.hpp"

#include "ma_isac/pgd.hpp"
#include "ma_isac/units.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace ma_isac {

namespace {
constexpr double kEpsF = 1e-12; // guards the relative-change test when F ~ 0

Eigen::VectorXd gamma_vector(const ScenarioConfig& cfg) {
    Eigen::VectorXd g(cfg.num_users);
    for (int k = 0; k < cfg.num_users; ++k)
        g[k] = cfg.sinr_targets[k];
    return g;
}

ConicSettings solver_settings(const ScenarioConfig& cfg) {
    ConicSettings s;
    // 10x headroom: core tolerances act on the equilibrated problem
    s.feas_tol = cfg.sdp_tol * 0.1;
    s.rel_gap_tol = cfg.sdp_tol * 0.1;
    return s;
}

} // namespace

PddState run_inner_bcd(PddState state, const ScenarioConfig& cfg,
                       const std::vector<PathSet>& paths_normalized, bool enable_pgd,
                       std::vector<PddTraceRow>* trace) {
    const Eigen::VectorXd gamma = gamma_vector(cfg);
    const double rho = cfg.pdd.rho0 * std::pow(cfg.pdd.c0, state.outer_index);
    const ConicSettings settings = solver_settings(cfg);
    std::vector<Eigen::VectorXcd> h = synthesize_channels(paths_normalized, state.t, cfg.wavelength);

    double f_prev = 0.0;
    bool have_prev = false;
    for (int i = 1; i <= cfg.pdd.max_inner; ++i) {
        InnerSdpSolution sdp = solve_inner_sdp(state.t, state.xi, rho, h, gamma, 1.0, cfg.tx_power,
                                               cfg.target_angle, cfg.wavelength, settings);
        // the penalty subproblem turns hostile at very small rho on instances
        // whose SINR system is unattainable; keep the last good state rather
        // than ingesting a junk iterate
        if (sdp.pres > 1e-6 || sdp.rel_gap > 1e-3 || !std::isfinite(sdp.objective)) {
            state.solver_breakdown = true;
            return state;
        }
        state.w_lifted = std::move(sdp.w_lifted);
        state.w_columns = std::move(sdp.w_columns);
        state.q = std::move(sdp.q);
        state.has_solution = true;
        state.rank_certified_all = state.rank_certified_all && sdp.rank_certified;
        double f = sdp.objective;

        if (enable_pgd) {
            auto [t_new, pgd_trace] = run_pgd(state.t, state.w_lifted, state.q, state.xi, rho,
                                              paths_normalized, cfg.target_angle, cfg.wavelength,
                                              cfg.aperture, cfg.pgd);
            state.t = t_new;
            h = synthesize_channels(paths_normalized, state.t, cfg.wavelength);
            f = pgd_trace.f_values.back();
        }

        state.f_history.push_back(f);
        ++state.inner_iters_total;
        if (trace) {
            const Eigen::MatrixXd v = coupling_v_lifted(h, state.w_lifted);
            trace->push_back({state.outer_index, i, f, violation_inf(state.q, v), rho});
        }

        if (have_prev) {
            const double rel = std::abs(f - f_prev) / std::max(std::abs(f), kEpsF);
            if (rel < cfg.pdd.delta_in)
                break;
        }
        f_prev = f;
        have_prev = true;
    }
    return state;
}

Eigen::VectorXd audit_feasibility(const Beamformer& w_columns,
                                  const std::vector<Eigen::VectorXcd>& h, double noise_power,
                                  const Eigen::VectorXd& gamma) {
    const int users = static_cast<int>(h.size());
    const double inf = std::numeric_limits<double>::infinity();
    Eigen::VectorXd slack(users);
    for (int k = 0; k < users; ++k) {
        if (gamma[k] <= 0.0) {
            slack[k] = inf; // vacuous target
            continue;
        }
        const double s = sinr(h, w_columns, noise_power, k);
        slack[k] = (s <= 0.0) ? -inf : linear_to_db(s) - linear_to_db(gamma[k]);
    }
    return slack;
}

namespace {

PddResult run_pdd_single(const ScenarioConfig& cfg, const std::vector<PathSet>& paths_normalized,
                         const Positions& t0, const PddOptions& options) {
    const auto t_start = std::chrono::steady_clock::now();
    const Eigen::VectorXd gamma = gamma_vector(cfg);
    const ConicSettings settings = solver_settings(cfg);

    PddState state;
    state.t = t0;
    state.xi = Eigen::MatrixXd::Zero(cfg.num_users, cfg.num_users);

    PddResult result;
    std::vector<PddTraceRow>* trace_ptr = options.collect_trace ? &result.trace : nullptr;

    for (int j = 0; j < cfg.pdd.max_outer; ++j) {
        state.outer_index = j;
        state = run_inner_bcd(std::move(state), cfg, paths_normalized, options.enable_pgd, trace_ptr);
        if (state.solver_breakdown)
            break;

        const std::vector<Eigen::VectorXcd> h =
            synthesize_channels(paths_normalized, state.t, cfg.wavelength);
        const Eigen::MatrixXd v = coupling_v_lifted(h, state.w_lifted);
        const double viol = violation_inf(state.q, v);
        state.violation_history.push_back(viol);
        if (viol < cfg.pdd.delta_out) {
            result.converged = true;
            break;
        }
        const double rho = cfg.pdd.rho0 * std::pow(cfg.pdd.c0, j);
        state.xi += (state.q - v) / rho;
    }

    result.outer_iters = static_cast<int>(state.violation_history.size());
    result.inner_iters_total = state.inner_iters_total;
    result.violation_history = state.violation_history;
    result.final_violation = state.violation_history.empty() ? 0.0 : state.violation_history.back();
    result.rank_certified_all = state.rank_certified_all;

    // final polish: exact fixed-position solve at the converged geometry, so
    // the reported beamformer satisfies the true SINR constraints. The start
    // geometry is kept as a fallback candidate: the AL descent tracks the
    // penalized objective, which can drift away from the polished gain.
    Positions t_sol = state.t;
    std::vector<Eigen::VectorXcd> h = synthesize_channels(paths_normalized, t_sol, cfg.wavelength);
    FixedSdpResult polish = solve_fixed_position_sdp(t_sol, h, gamma, 1.0, cfg.tx_power,
                                                     cfg.target_angle, cfg.wavelength, settings);
    if ((t0 - t_sol).norm() > 0.0) {
        const std::vector<Eigen::VectorXcd> h0 =
            synthesize_channels(paths_normalized, t0, cfg.wavelength);
        FixedSdpResult at_start = solve_fixed_position_sdp(t0, h0, gamma, 1.0, cfg.tx_power,
                                                           cfg.target_angle, cfg.wavelength,
                                                           settings);
        const bool start_wins =
            at_start.feasible && (!polish.feasible || at_start.gain > polish.gain);
        if (start_wins) {
            polish = std::move(at_start);
            t_sol = t0;
            h = h0;
        }
    }

    result.t = t_sol;
    result.polish_status = polish.status;
    if (polish.feasible) {
        result.w_columns = polish.w_columns;
        result.rank_certified_all = result.rank_certified_all && polish.rank_certified;
    } else {
        result.w_columns = state.has_solution
                               ? state.w_columns
                               : Beamformer(Eigen::MatrixXcd::Zero(cfg.num_antennas, cfg.num_users));
    }

    result.gain = beampattern_gain(result.t, result.w_columns, cfg.target_angle, cfg.wavelength);
    result.gain_db_over_pt = linear_to_db(std::max(result.gain, 1e-300) / cfg.tx_power);
    result.sinr_slack_db = audit_feasibility(result.w_columns, h, 1.0, gamma);
    result.sinr_db.resize(cfg.num_users);
    for (int k = 0; k < cfg.num_users; ++k) {
        const double s = sinr(h, result.w_columns, 1.0, k);
        result.sinr_db[k] = s > 0.0 ? linear_to_db(s) : -std::numeric_limits<double>::infinity();
    }
    result.feasible = polish.feasible && (result.sinr_slack_db.array() >= -0.01).all();
    if (!polish.feasible)
        result.verdict = "infeasible at converged geometry";
    else if (!result.feasible)
        result.verdict = "polished solution violates SINR audit";
    else
        result.verdict = "feasible";

    const auto t_end = std::chrono::steady_clock::now();
    result.wall_ms = std::chrono::duration<double, std::milli>(t_end - t_start).count();
    return result;
}

} // namespace

namespace {

// score feasible random geometries with the exact fixed-position design and
// return the best one; falls back to the scheme init when nothing feasible
Positions probe_initial_positions(const ScenarioConfig& cfg,
                                  const std::vector<PathSet>& paths_normalized,
                                  const Eigen::VectorXd& gamma, InitScheme scheme, int draws) {
    const ConicSettings settings = solver_settings(cfg);
    Positions best_t =
        initial_positions(cfg.num_antennas, cfg.aperture, cfg.wavelength, scheme);
    double best_gain = -1.0;
    {
        const auto h = synthesize_channels(paths_normalized, best_t, cfg.wavelength);
        const FixedSdpResult fx = solve_fixed_position_sdp(
            best_t, h, gamma, 1.0, cfg.tx_power, cfg.target_angle, cfg.wavelength, settings);
        if (fx.feasible)
            best_gain = fx.gain;
    }
    Rng rng = Rng::from_stream(cfg.master_seed, 0x50726f6265ULL, 0);
    for (int d = 0; d < draws; ++d) {
        // score the projected draw: PGD will live in the clamp's range anyway
        const Positions t = project_positions(
            sample_random_positions(rng, cfg.num_antennas, cfg.aperture, cfg.wavelength),
            cfg.aperture, cfg.wavelength);
        const auto h = synthesize_channels(paths_normalized, t, cfg.wavelength);
        const FixedSdpResult fx = solve_fixed_position_sdp(t, h, gamma, 1.0, cfg.tx_power,
                                                           cfg.target_angle, cfg.wavelength,
                                                           settings);
        if (fx.feasible && fx.gain > best_gain) {
            best_gain = fx.gain;
            best_t = t;
        }
    }
    return best_t;
}

} // namespace

PddResult run_pdd(const ScenarioConfig& cfg, const std::vector<PathSet>& paths,
                  const PddOptions& options) {
    const std::vector<PathSet> normalized = normalize_by_noise(paths, cfg.noise_power);
    const Eigen::VectorXd gamma = gamma_vector(cfg);

    PddResult best;
    bool have_best = false;
    double total_ms = 0.0;
    for (int start = 0; start < std::max(1, options.num_starts); ++start) {
        Positions t0;
        if (start == 0) {
            if (options.t0)
                t0 = *options.t0;
            else if (options.probe_draws > 0)
                t0 = probe_initial_positions(cfg, normalized, gamma, options.init,
                                             options.probe_draws);
            else
                t0 = initial_positions(cfg.num_antennas, cfg.aperture, cfg.wavelength,
                                       options.init);
        } else {
            Rng rng = Rng::from_stream(cfg.master_seed, 0x5374617274ULL, static_cast<std::uint64_t>(start));
            t0 = sample_random_positions(rng, cfg.num_antennas, cfg.aperture, cfg.wavelength);
        }
        // start inside the projection's fixed-point set, else the first PGD
        // candidate step teleports through the interior clamp
        t0 = project_positions(t0, cfg.aperture, cfg.wavelength);
        PddResult r = run_pdd_single(cfg, normalized, t0, options);
        total_ms += r.wall_ms;
        const bool better = !have_best || (r.feasible && !best.feasible) ||
                            (r.feasible == best.feasible && r.gain > best.gain);
        if (better) {
            best = std::move(r);
            have_best = true;
        }
    }
    best.wall_ms = total_ms;
    return best;
}

} // namespace ma_isac
