// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#include "ma_isac/harness.hpp"

#include "ma_isac/csv.hpp"
#include "ma_isac/svg.hpp"
#include "ma_isac/units.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <thread>

namespace ma_isac {

ScenarioConfig apply_sweep_value(ScenarioConfig cfg, SweepAxis axis, double value) {
    switch (axis) {
    case SweepAxis::SinrTargetDb:
        cfg.sinr_targets.assign(cfg.num_users, db_to_linear(value));
        break;
    case SweepAxis::NumAntennas:
        cfg.num_antennas = static_cast<int>(std::lround(value));
        break;
    }
    cfg.validate();
    return cfg;
}

namespace {

RunRecord execute_task(const CampaignSpec& spec, double value, Scheme scheme, int realization) {
    RunRecord rec;
    rec.realization = realization;
    rec.scheme = scheme;
    rec.sweep_value = value;
    try {
        const ScenarioConfig cfg = apply_sweep_value(spec.base, spec.axis, value);
        const PddResult r = run_baseline(scheme, cfg, realization, spec.options);
        rec.gain_db = r.gain_db_over_pt;
        rec.min_slack_db = r.sinr_slack_db.size() > 0 ? r.sinr_slack_db.minCoeff()
                                                      : std::numeric_limits<double>::infinity();
        rec.violation = r.final_violation;
        rec.outer_iters = r.outer_iters;
        rec.inner_iters_total = r.inner_iters_total;
        rec.wall_ms = r.wall_ms;
        rec.status = r.feasible ? "ok" : "infeasible";
    } catch (const std::exception& e) {
        std::string what = e.what();
        const auto nl = what.find('\n');
        if (nl != std::string::npos)
            what = what.substr(0, nl);
        std::replace(what.begin(), what.end(), ',', ';');
        rec.status = "error:" + what;
        rec.gain_db = std::numeric_limits<double>::quiet_NaN();
        rec.min_slack_db = std::numeric_limits<double>::quiet_NaN();
    }
    return rec;
}

} // namespace

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& runs,
                                  const std::vector<Scheme>& schemes) {
    std::vector<Scheme> solver_schemes;
    for (Scheme s : schemes)
        if (s != Scheme::UpperBound)
            solver_schemes.push_back(s);

    // realization -> ok across all solver schemes, per sweep value
    std::map<double, std::map<int, int>> ok_counts;
    for (const auto& r : runs)
        if (r.scheme != Scheme::UpperBound && r.status == "ok")
            ok_counts[r.sweep_value][r.realization] += 1;

    std::vector<SummaryRow> rows;
    for (Scheme scheme : schemes) {
        std::map<double, std::vector<const RunRecord*>> by_value;
        for (const auto& r : runs)
            if (r.scheme == scheme)
                by_value[r.sweep_value].push_back(&r);
        for (auto& [value, recs] : by_value) {
            SummaryRow row;
            row.sweep_value = value;
            row.scheme = scheme;
            double sum = 0.0, sum_ms = 0.0;
            std::vector<double> gains;
            for (const RunRecord* r : recs) {
                const bool paired_ok = solver_schemes.empty() ||
                                       ok_counts[value][r->realization] ==
                                           static_cast<int>(solver_schemes.size());
                if (!paired_ok) {
                    ++row.realizations_dropped;
                    continue;
                }
                gains.push_back(r->gain_db);
                sum += r->gain_db;
                sum_ms += r->wall_ms;
            }
            row.realizations_used = static_cast<int>(gains.size());
            if (!gains.empty()) {
                row.mean_gain_db = sum / gains.size();
                row.mean_wall_ms = sum_ms / gains.size();
                double ss = 0.0;
                for (double g : gains)
                    ss += (g - row.mean_gain_db) * (g - row.mean_gain_db);
                row.std_gain_db = gains.size() > 1 ? std::sqrt(ss / (gains.size() - 1)) : 0.0;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

CampaignResult run_campaign(const CampaignSpec& spec) {
    std::vector<double> values = spec.values;
    if (values.empty()) {
        if (spec.axis == SweepAxis::SinrTargetDb)
            values.push_back(linear_to_db(spec.base.sinr_targets.empty() ? 1.0
                                                                         : spec.base.sinr_targets[0]));
        else
            values.push_back(spec.base.num_antennas);
    }

    struct Task {
        double value;
        Scheme scheme;
        int realization;
    };
    std::vector<Task> tasks;
    for (double v : values)
        for (Scheme s : spec.schemes)
            for (int r = 0; r < spec.realizations; ++r)
                tasks.push_back({v, s, r});

    std::vector<RunRecord> records(tasks.size());
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, spec.workers);
    auto run_worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size())
                return;
            records[i] = execute_task(spec, tasks[i].value, tasks[i].scheme, tasks[i].realization);
        }
    };
    if (workers == 1) {
        run_worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(run_worker);
        for (auto& th : pool)
            th.join();
    }

    CampaignResult result;
    result.runs = std::move(records);
    result.summary = summarize(result.runs, spec.schemes);
    return result;
}

void write_runs_csv(const std::string& path, const std::vector<RunRecord>& runs) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "# ma-isac runs schema=1\n";
    out << "realization,scheme,sweep_value,gain_db,min_sinr_slack_db,violation,outer_iters,"
           "inner_iters_total,wall_ms,status\n";
    for (const auto& r : runs)
        out << r.realization << ',' << to_string(r.scheme) << ',' << format_double(r.sweep_value)
            << ',' << format_double(r.gain_db) << ',' << format_double(r.min_slack_db) << ','
            << format_double(r.violation) << ',' << r.outer_iters << ',' << r.inner_iters_total
            << ',' << format_double(r.wall_ms) << ',' << r.status << '\n';
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& summary) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "# ma-isac summary schema=1\n";
    out << "sweep_value,scheme,realizations_used,realizations_dropped,mean_gain_db,std_gain_db,"
           "mean_wall_ms\n";
    for (const auto& s : summary)
        out << format_double(s.sweep_value) << ',' << to_string(s.scheme) << ','
            << s.realizations_used << ',' << s.realizations_dropped << ','
            << format_double(s.mean_gain_db) << ',' << format_double(s.std_gain_db) << ','
            << format_double(s.mean_wall_ms) << '\n';
}

namespace {

int classify_exit(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) != nullptr)
        return 1;
    return 2;
}

BaselineOptions baseline_options(InitScheme init, bool fa_center, int num_starts, bool trace,
                                 int probe_draws) {
    BaselineOptions opt;
    opt.fa_center = fa_center;
    opt.pdd.init = init;
    opt.pdd.num_starts = num_starts;
    opt.pdd.collect_trace = trace;
    opt.pdd.probe_draws = probe_draws;
    return opt;
}

} // namespace

int run_solve_command(const SolveArgs& args) {
    try {
        ScenarioConfig cfg = load_config(args.config_path);
        if (args.seed)
            cfg.master_seed = *args.seed;
        const BaselineOptions opt =
            baseline_options(args.init, args.fa_center, args.num_starts, args.trace, args.probe_draws);
        const PddResult r = run_baseline(args.scheme, cfg, args.realization, opt);

        std::filesystem::create_directories(args.out_dir);
        const std::string sol_path = args.out_dir + "/solution.csv";
        std::ofstream out(sol_path);
        if (!out)
            throw std::runtime_error("cannot write " + sol_path);
        out << "# ma-isac solution schema=1\n";
        out << "# scheme=" << to_string(args.scheme) << " seed=" << cfg.master_seed
            << " realization=" << args.realization << " verdict=" << r.verdict << "\n";
        out << "field,i,j,value\n";
        for (Eigen::Index p = 0; p < r.t.size(); ++p)
            out << "t," << p << ",0," << format_double(r.t[p]) << '\n';
        for (Eigen::Index p = 0; p < r.w_columns.rows(); ++p)
            for (Eigen::Index k = 0; k < r.w_columns.cols(); ++k) {
                out << "w_re," << p << ',' << k << ',' << format_double(r.w_columns(p, k).real())
                    << '\n';
                out << "w_im," << p << ',' << k << ',' << format_double(r.w_columns(p, k).imag())
                    << '\n';
            }
        for (Eigen::Index k = 0; k < r.sinr_db.size(); ++k)
            out << "sinr_db," << k << ",0," << format_double(r.sinr_db[k]) << '\n';
        for (Eigen::Index k = 0; k < r.sinr_slack_db.size(); ++k)
            out << "sinr_slack_db," << k << ",0," << format_double(r.sinr_slack_db[k]) << '\n';
        out << "gain_db,0,0," << format_double(r.gain_db_over_pt) << '\n';
        out << "violation,0,0," << format_double(r.final_violation) << '\n';
        out << "outer_iters,0,0," << r.outer_iters << '\n';
        out << "inner_iters_total,0,0," << r.inner_iters_total << '\n';
        out << "feasible,0,0," << (r.feasible ? 1 : 0) << '\n';
        out.close();

        if (args.trace) {
            std::ofstream tr(args.out_dir + "/trace.csv");
            tr << "# ma-isac trace schema=1\n";
            tr << "outer,inner,f,violation,rho\n";
            for (const auto& row : r.trace)
                tr << row.outer << ',' << row.inner << ',' << format_double(row.f) << ','
                   << format_double(row.violation) << ',' << format_double(row.rho) << '\n';
        }

        std::cout << "scheme=" << to_string(args.scheme) << " gain_db=" << format_double(r.gain_db_over_pt)
                  << " feasible=" << (r.feasible ? "yes" : "no") << " verdict=\"" << r.verdict
                  << "\"\n";
        if (!r.feasible)
            return 3;
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return classify_exit(e);
    }
}

int run_montecarlo_command(const MonteCarloArgs& args) {
    try {
        CampaignSpec spec;
        spec.base = load_config(args.config_path);
        if (args.seed)
            spec.base.master_seed = *args.seed;
        spec.axis = args.axis;
        spec.values = args.values;
        spec.schemes = args.schemes;
        spec.realizations = args.realizations;
        spec.workers = args.workers;
        spec.options = baseline_options(args.init, args.fa_center, 1, false, args.probe_draws);

        const CampaignResult result = run_campaign(spec);
        std::filesystem::create_directories(args.out_dir);
        write_runs_csv(args.out_dir + "/runs.csv", result.runs);
        write_summary_csv(args.out_dir + "/summary.csv", result.summary);
        for (const auto& s : result.summary)
            std::cout << "sweep=" << format_double(s.sweep_value) << " scheme=" << to_string(s.scheme)
                      << " mean_gain_db=" << format_double(s.mean_gain_db)
                      << " used=" << s.realizations_used << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return classify_exit(e);
    }
}

int run_sweep_command(const SweepArgs& args) {
    try {
        ScenarioConfig cfg = load_config(args.config_path);
        if (args.seed)
            cfg.master_seed = *args.seed;
        std::filesystem::create_directories(args.out_dir);

        std::vector<double> grid_deg;
        for (double d = args.theta_min_deg; d <= args.theta_max_deg + 1e-9; d += args.theta_step_deg)
            grid_deg.push_back(d);

        std::vector<SvgSeries> series;
        for (Scheme scheme : args.schemes) {
            SvgSeries s;
            s.label = to_string(scheme);
            s.x = grid_deg;
            if (scheme == Scheme::UpperBound) {
                s.y.assign(grid_deg.size(), linear_to_db(cfg.num_antennas));
            } else {
                const BaselineOptions opt = baseline_options(args.init, args.fa_center, 1, false, args.probe_draws);
                const PddResult r = run_baseline(scheme, cfg, args.realization, opt);
                if (!r.feasible)
                    std::cerr << "warning: scheme " << to_string(scheme) << " " << r.verdict << "\n";
                std::vector<double> grid_rad;
                grid_rad.reserve(grid_deg.size());
                for (double d : grid_deg)
                    grid_rad.push_back(deg_to_rad(d));
                const std::vector<double> gains =
                    beampattern_sweep(r.t, r.w_columns, cfg.wavelength, grid_rad);
                s.y.reserve(gains.size());
                for (double g : gains)
                    s.y.push_back(linear_to_db(std::max(g, 1e-300) / cfg.tx_power));
            }
            std::ofstream out(args.out_dir + "/sweep_" + to_string(scheme) + ".csv");
            out << "# ma-isac beampattern sweep schema=1\n";
            out << "theta_deg,gain_db\n";
            for (std::size_t i = 0; i < grid_deg.size(); ++i)
                out << format_double(grid_deg[i]) << ',' << format_double(s.y[i]) << '\n';
            series.push_back(std::move(s));
        }
        write_line_svg(args.out_dir + "/sweep.svg", series, "Transmit beampattern",
                       "angle (deg)", "normalized gain (dB)");
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return classify_exit(e);
    }
}

} // namespace ma_isac
