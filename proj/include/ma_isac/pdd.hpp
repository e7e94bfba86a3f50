// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#pragma once

#include "ma_isac/channel.hpp"
#include "ma_isac/geometry.hpp"
#include "ma_isac/scenario.hpp"
#include "ma_isac/sdr.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace ma_isac {

struct PddTraceRow {
    int outer = 0;
    int inner = 0;
    double f = 0.0;
    double violation = 0.0;
    double rho = 0.0;
};

// Mutable state of the double loop. Channels are derived state: they are
// re-synthesized from the path sets whenever t moves.
struct PddState {
    Positions t;
    std::vector<Eigen::MatrixXcd> w_lifted;
    Beamformer w_columns;
    Eigen::MatrixXd q;
    Eigen::MatrixXd xi;
    int outer_index = 0; // j; the current penalty is rho0 * c0^j
    int inner_iters_total = 0;
    bool has_solution = false; // false until the first inner SDP solve
    std::vector<double> f_history;         // per inner iteration
    std::vector<double> violation_history; // per outer iteration
    bool rank_certified_all = true;
    bool solver_breakdown = false; // an inner SDP failed; state holds the last good iterate
};

struct PddOptions {
    InitScheme init = InitScheme::UniformSpread;
    bool enable_pgd = true;
    bool collect_trace = false;
    int num_starts = 1;   // >1: extra PGD-seeded random starts, best polished gain wins
    int probe_draws = 30; // >0: score this many random geometries with the fixed-position
                          // SDP and start from the best one found (plus the scheme init);
                          // 0 starts from the scheme init directly
    std::optional<Positions> t0; // explicit start, overrides init/probing
};

struct PddResult {
    Positions t;
    Beamformer w_columns;          // polished, rank-one extracted
    Eigen::VectorXd sinr_db;       // achieved, from the polished beamformer
    Eigen::VectorXd sinr_slack_db; // achieved minus target
    double gain = 0.0;             // ||a^H W_D||^2, absolute units
    double gain_db_over_pt = 0.0;  // 10 log10(gain / P_t)
    double final_violation = 0.0;
    bool feasible = false;
    bool converged = false; // outer loop exited on the violation criterion
    std::string verdict;
    int outer_iters = 0;
    int inner_iters_total = 0;
    double wall_ms = 0.0;
    std::vector<double> violation_history;
    std::vector<PddTraceRow> trace;
    bool rank_certified_all = true;
    ConicStatus polish_status = ConicStatus::NumericalProblem;
};

// One inner BCD sweep: alternate {inner SDP over (W, Q); PGD over t} until the
// relative F change drops below delta_in or max_inner passes are spent.
PddState run_inner_bcd(PddState state, const ScenarioConfig& cfg,
                       const std::vector<PathSet>& paths_normalized, bool enable_pgd,
                       std::vector<PddTraceRow>* trace);

// Full PDD-JAPB run on one channel realization. `paths` are physical path
// sets; noise normalization happens internally.
PddResult run_pdd(const ScenarioConfig& cfg, const std::vector<PathSet>& paths,
                  const PddOptions& options = {});

// Recompute achieved SINR slack (dB) for a beamformer at positions t.
// Entries are +inf for vacuous targets and -inf for unserved users.
Eigen::VectorXd audit_feasibility(const Beamformer& w_columns,
                                  const std::vector<Eigen::VectorXcd>& h, double noise_power,
                                  const Eigen::VectorXd& gamma);

} // namespace ma_isac
