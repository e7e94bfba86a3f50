// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#include "ma_isac/harness.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace {

ma_isac::InitScheme parse_init(const std::string& name) {
    if (name == "ula")
        return ma_isac::InitScheme::UlaCompact;
    if (name == "spread")
        return ma_isac::InitScheme::UniformSpread;
    throw CLI::ValidationError("--init", "expected 'spread' or 'ula'");
}

std::vector<ma_isac::Scheme> parse_schemes(const std::vector<std::string>& names) {
    std::vector<ma_isac::Scheme> out;
    for (const auto& n : names)
        out.push_back(ma_isac::scheme_from_string(n));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ma-isac: joint movable-antenna positioning and beamforming for ISAC"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::string init_name = "spread";
    bool fa_center = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int probe_draws = 30;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "configuration file")->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "override the config master seed")
            ->each([&](const std::string&) { seed_set = true; });
        cmd->add_option("--init", init_name, "PDD position init: spread|ula");
        cmd->add_flag("--fa-center", fa_center, "center the FA baseline ULA in the aperture");
        cmd->add_option("--probe", probe_draws, "random geometries probed for the PDD start (0 = off)");
    };

    // solve
    auto* solve = app.add_subcommand("solve", "run one scheme on one realization");
    std::string scheme_name = "pdd";
    std::uint64_t realization = 0;
    bool trace = false;
    int num_starts = 1;
    add_common(solve);
    solve->add_option("--scheme", scheme_name, "pdd|fa|random|bound");
    solve->add_option("--realization", realization, "realization index");
    solve->add_flag("--trace", trace, "emit trace.csv with per-iteration records");
    solve->add_option("--starts", num_starts, "PDD multi-start count (best gain wins)");

    // montecarlo
    auto* mc = app.add_subcommand("montecarlo", "sweep campaign over many realizations");
    std::vector<std::string> mc_schemes{"pdd", "fa", "random", "bound"};
    std::string axis_name = "gamma";
    std::vector<double> sweep_values;
    int realizations = 50;
    int workers = 1;
    add_common(mc);
    mc->add_option("--scheme", mc_schemes, "schemes to run (repeatable)")->delimiter(',');
    mc->add_option("--sweep-axis", axis_name, "gamma|nt");
    mc->add_option("--sweep-values", sweep_values, "sweep values (dB targets or antenna counts)")
        ->delimiter(',');
    mc->add_option("--realizations", realizations, "channel realizations per point");
    mc->add_option("--workers", workers, "worker threads");

    // sweep
    auto* sw = app.add_subcommand("sweep", "beampattern sweep of solved instances");
    std::vector<std::string> sw_schemes{"pdd", "fa"};
    double theta_min = -90.0, theta_max = 90.0, theta_step = 0.25;
    std::uint64_t sw_realization = 0;
    add_common(sw);
    sw->add_option("--scheme", sw_schemes, "schemes to sweep (repeatable)")->delimiter(',');
    sw->add_option("--realization", sw_realization, "realization index");
    sw->add_option("--theta-min", theta_min, "grid start, degrees");
    sw->add_option("--theta-max", theta_max, "grid end, degrees");
    sw->add_option("--theta-step", theta_step, "grid step, degrees");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            ma_isac::SolveArgs args;
            args.config_path = config_path;
            args.scheme = ma_isac::scheme_from_string(scheme_name);
            if (seed_set)
                args.seed = seed;
            args.realization = realization;
            args.out_dir = out_dir;
            args.trace = trace;
            args.init = parse_init(init_name);
            args.fa_center = fa_center;
            args.num_starts = num_starts;
            args.probe_draws = probe_draws;
            return ma_isac::run_solve_command(args);
        }
        if (mc->parsed()) {
            ma_isac::MonteCarloArgs args;
            args.config_path = config_path;
            args.schemes = parse_schemes(mc_schemes);
            if (axis_name == "gamma")
                args.axis = ma_isac::SweepAxis::SinrTargetDb;
            else if (axis_name == "nt")
                args.axis = ma_isac::SweepAxis::NumAntennas;
            else
                throw CLI::ValidationError("--sweep-axis", "expected 'gamma' or 'nt'");
            args.values = sweep_values;
            args.realizations = realizations;
            args.workers = workers;
            if (seed_set)
                args.seed = seed;
            args.out_dir = out_dir;
            args.init = parse_init(init_name);
            args.fa_center = fa_center;
            args.probe_draws = probe_draws;
            return ma_isac::run_montecarlo_command(args);
        }
        ma_isac::SweepArgs args;
        args.config_path = config_path;
        args.schemes = parse_schemes(sw_schemes);
        if (seed_set)
            args.seed = seed;
        args.realization = sw_realization;
        args.out_dir = out_dir;
        args.theta_min_deg = theta_min;
        args.theta_max_deg = theta_max;
        args.theta_step_deg = theta_step;
        args.init = parse_init(init_name);
        args.fa_center = fa_center;
        args.probe_draws = probe_draws;
        return ma_isac::run_sweep_command(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
