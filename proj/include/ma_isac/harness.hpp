// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#pragma once

#include "ma_isac/baselines.hpp"
#include "ma_isac/scenario.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ma_isac {

enum class SweepAxis { SinrTargetDb, NumAntennas };

struct CampaignSpec {
    ScenarioConfig base;
    SweepAxis axis = SweepAxis::SinrTargetDb;
    std::vector<double> values; // sweep values; empty = single run at base config
    std::vector<Scheme> schemes{Scheme::PddJapb, Scheme::FixedUla, Scheme::RandomMa,
                                Scheme::UpperBound};
    int realizations = 50;
    int workers = 1;
    BaselineOptions options;
};

struct RunRecord {
    int realization = 0;
    Scheme scheme = Scheme::PddJapb;
    double sweep_value = 0.0;
    double gain_db = 0.0;
    double min_slack_db = 0.0;
    double violation = 0.0;
    int outer_iters = 0;
    int inner_iters_total = 0;
    double wall_ms = 0.0;
    std::string status; // ok | infeasible | error:<reason>
};

struct SummaryRow {
    double sweep_value = 0.0;
    Scheme scheme = Scheme::PddJapb;
    int realizations_used = 0;
    int realizations_dropped = 0;
    double mean_gain_db = 0.0;
    double std_gain_db = 0.0;
    double mean_wall_ms = 0.0;
};

struct CampaignResult {
    std::vector<RunRecord> runs;
    std::vector<SummaryRow> summary;
};

ScenarioConfig apply_sweep_value(ScenarioConfig cfg, SweepAxis axis, double value);

// Runs (value x scheme x realization) tasks over a worker pool. Results are
// identical for any worker count; rows come out in canonical order.
CampaignResult run_campaign(const CampaignSpec& spec);

// Pairwise exclusion: a realization enters the averages only if every
// solver-backed scheme in the campaign produced a feasible solution for it.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& runs,
                                  const std::vector<Scheme>& schemes);

void write_runs_csv(const std::string& path, const std::vector<RunRecord>& runs);
void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& summary);

// ---- CLI command cores (exit codes: 0 ok, 1 config, 2 solver, 3 infeasible) ----

struct SolveArgs {
    std::string config_path;
    Scheme scheme = Scheme::PddJapb;
    std::optional<std::uint64_t> seed; // overrides config seed
    std::uint64_t realization = 0;
    std::string out_dir = ".";
    bool trace = false;
    InitScheme init = InitScheme::UniformSpread;
    bool fa_center = false;
    int num_starts = 1;
    int probe_draws = 30;
};

int run_solve_command(const SolveArgs& args);

struct MonteCarloArgs {
    std::string config_path;
    std::vector<Scheme> schemes{Scheme::PddJapb, Scheme::FixedUla, Scheme::RandomMa,
                                Scheme::UpperBound};
    SweepAxis axis = SweepAxis::SinrTargetDb;
    std::vector<double> values;
    int realizations = 50;
    int workers = 1;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    InitScheme init = InitScheme::UniformSpread;
    bool fa_center = false;
    int probe_draws = 30;
};

int run_montecarlo_command(const MonteCarloArgs& args);

struct SweepArgs {
    std::string config_path;
    std::vector<Scheme> schemes{Scheme::PddJapb, Scheme::FixedUla};
    std::optional<std::uint64_t> seed;
    std::uint64_t realization = 0;
    std::string out_dir = ".";
    double theta_min_deg = -90.0;
    double theta_max_deg = 90.0;
    double theta_step_deg = 0.25;
    InitScheme init = InitScheme::UniformSpread;
    bool fa_center = false;
    int probe_draws = 30;
};

int run_sweep_command(const SweepArgs& args);

} // namespace ma_isac
