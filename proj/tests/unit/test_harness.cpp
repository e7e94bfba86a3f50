// SPDX-License-Identifier: Apache-2.0
#include "ma_isac/harness.hpp"

#include "ma_isac/csv.hpp"
#include "ma_isac/units.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

using namespace ma_isac;

namespace {

ScenarioConfig small_config() {
    ScenarioConfig cfg;
    cfg.num_users = 2;
    cfg.num_antennas = 4;
    cfg.sinr_targets.assign(2, db_to_linear(5.0));
    cfg.master_seed = 9;
    cfg.validate();
    return cfg;
}

std::string write_config_file(const std::string& name) {
    const std::string path = name;
    std::ofstream out(path);
    out << "k_users = 2\nn_antennas = 4\nsinr_target_db = 5\nseed = 9\n";
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("apply_sweep_value handles both axes and validates") {
    ScenarioConfig cfg = small_config();
    const ScenarioConfig g = apply_sweep_value(cfg, SweepAxis::SinrTargetDb, 12.0);
    CHECK(g.sinr_targets[0] == doctest::Approx(db_to_linear(12.0)));
    const ScenarioConfig n = apply_sweep_value(cfg, SweepAxis::NumAntennas, 6);
    CHECK(n.num_antennas == 6);
    CHECK_THROWS_AS(apply_sweep_value(cfg, SweepAxis::NumAntennas, 40), ConfigError);
}

TEST_CASE("single-run campaign summary equals the run") {
    CampaignSpec spec;
    spec.base = small_config();
    spec.axis = SweepAxis::SinrTargetDb;
    spec.values = {5.0};
    spec.schemes = {Scheme::FixedUla};
    spec.realizations = 1;
    const CampaignResult res = run_campaign(spec);
    REQUIRE(res.runs.size() == 1);
    REQUIRE(res.summary.size() == 1);
    if (res.runs[0].status == "ok") {
        CHECK(res.summary[0].realizations_used == 1);
        CHECK(res.summary[0].mean_gain_db == doctest::Approx(res.runs[0].gain_db));
        CHECK(res.summary[0].std_gain_db == 0.0);
    }
}

TEST_CASE("campaign is invariant under worker count") {
    CampaignSpec spec;
    spec.base = small_config();
    spec.axis = SweepAxis::SinrTargetDb;
    spec.values = {4.0, 8.0};
    spec.schemes = {Scheme::FixedUla, Scheme::RandomMa};
    spec.realizations = 4;
    spec.workers = 1;
    const CampaignResult one = run_campaign(spec);
    spec.workers = 2;
    const CampaignResult two = run_campaign(spec);
    REQUIRE(one.runs.size() == two.runs.size());
    for (std::size_t i = 0; i < one.runs.size(); ++i) {
        CHECK(one.runs[i].realization == two.runs[i].realization);
        CHECK(one.runs[i].scheme == two.runs[i].scheme);
        CHECK(one.runs[i].sweep_value == two.runs[i].sweep_value);
        CHECK(one.runs[i].gain_db == two.runs[i].gain_db); // bitwise
        CHECK(one.runs[i].status == two.runs[i].status);
    }
}

TEST_CASE("summary means match a recomputation from runs.csv") {
    CampaignSpec spec;
    spec.base = small_config();
    spec.axis = SweepAxis::SinrTargetDb;
    spec.values = {5.0};
    spec.schemes = {Scheme::FixedUla, Scheme::RandomMa, Scheme::UpperBound};
    spec.realizations = 6;
    const CampaignResult res = run_campaign(spec);
    const std::string dir = "harness_test_out";
    std::filesystem::create_directories(dir);
    write_runs_csv(dir + "/runs.csv", res.runs);
    write_summary_csv(dir + "/summary.csv", res.summary);

    const auto rows = read_csv(dir + "/runs.csv");
    REQUIRE(rows.size() == res.runs.size() + 1); // header + rows
    // recompute the fa mean over the pairwise-feasible set
    std::map<int, int> ok_count;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i][1] != "bound" && rows[i][9] == "ok")
            ok_count[std::stoi(rows[i][0])] += 1;
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i][1] != "fa" || ok_count[std::stoi(rows[i][0])] != 2)
            continue;
        sum += std::stod(rows[i][3]);
        ++n;
    }
    for (const auto& s : res.summary) {
        if (s.scheme != Scheme::FixedUla)
            continue;
        CHECK(s.realizations_used == n);
        if (n > 0)
            CHECK(s.mean_gain_db == doctest::Approx(sum / n).epsilon(1e-12));
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("solve command writes byte-identical outputs across reruns") {
    const std::string cfg_path = write_config_file("harness_solve.cfg");
    SolveArgs args;
    args.config_path = cfg_path;
    args.scheme = Scheme::FixedUla;
    args.seed = 7;
    args.out_dir = "harness_sol_a";
    CHECK(run_solve_command(args) == 0);
    args.out_dir = "harness_sol_b";
    CHECK(run_solve_command(args) == 0);
    CHECK(slurp("harness_sol_a/solution.csv") == slurp("harness_sol_b/solution.csv"));
    CHECK(slurp("harness_sol_a/solution.csv").find("gain_db") != std::string::npos);
    std::filesystem::remove_all("harness_sol_a");
    std::filesystem::remove_all("harness_sol_b");
    std::remove(cfg_path.c_str());
}

TEST_CASE("solve command exit codes: missing config") {
    SolveArgs args;
    args.config_path = "no_such_file.cfg";
    CHECK(run_solve_command(args) == 1);
}

TEST_CASE("bound solve emits the closed-form gain") {
    const std::string cfg_path = write_config_file("harness_bound.cfg");
    SolveArgs args;
    args.config_path = cfg_path;
    args.scheme = Scheme::UpperBound;
    args.out_dir = "harness_bound_out";
    CHECK(run_solve_command(args) == 0);
    bool found = false;
    for (const auto& row : read_csv("harness_bound_out/solution.csv")) {
        if (row[0] == "gain_db") {
            CHECK(std::stod(row[3]) == doctest::Approx(linear_to_db(4.0)).epsilon(1e-9));
            found = true;
        }
    }
    CHECK(found);
    std::filesystem::remove_all("harness_bound_out");
    std::remove(cfg_path.c_str());
}

TEST_CASE("sweep command emits a monotone grid with both endpoints and an svg") {
    const std::string cfg_path = write_config_file("harness_sweep.cfg");
    SweepArgs args;
    args.config_path = cfg_path;
    args.schemes = {Scheme::FixedUla, Scheme::UpperBound};
    args.out_dir = "harness_sweep_out";
    args.theta_min_deg = -90;
    args.theta_max_deg = 90;
    args.theta_step_deg = 1.0;
    CHECK(run_sweep_command(args) == 0);
    const auto rows = read_csv("harness_sweep_out/sweep_fa.csv");
    REQUIRE(rows.size() == 1 + 181);
    CHECK(std::stod(rows[1][0]) == doctest::Approx(-90.0));
    CHECK(std::stod(rows.back()[0]) == doctest::Approx(90.0));
    for (std::size_t i = 2; i < rows.size(); ++i)
        CHECK(std::stod(rows[i][0]) > std::stod(rows[i - 1][0]));
    CHECK(std::filesystem::exists("harness_sweep_out/sweep.svg"));
    const std::string svg = slurp("harness_sweep_out/sweep.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    std::filesystem::remove_all("harness_sweep_out");
    std::remove(cfg_path.c_str());
}

namespace {

// -3 dB main-lobe width around the global peak, in degrees on the grid
double lobe_width_deg(const std::vector<std::vector<std::string>>& rows) {
    std::size_t peak = 1;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (std::stod(rows[i][1]) > std::stod(rows[peak][1]))
            peak = i;
    const double level = std::stod(rows[peak][1]) - 3.0;
    std::size_t lo = peak, hi = peak;
    while (lo > 1 && std::stod(rows[lo - 1][1]) >= level)
        --lo;
    while (hi + 1 < rows.size() && std::stod(rows[hi + 1][1]) >= level)
        ++hi;
    return std::stod(rows[hi][0]) - std::stod(rows[lo][0]);
}

} // namespace

TEST_CASE("pdd beampattern peaks at the target and outresolves the fixed array") {
    // screened feasible realization at Nt=8, 10 dB targets
    ScenarioConfig cfg;
    cfg.num_users = 4;
    cfg.num_antennas = 8;
    cfg.sinr_targets.assign(4, db_to_linear(10.0));
    cfg.master_seed = 1;
    cfg.validate();
    std::uint64_t feasible_r = 0;
    {
        const Positions ula =
            initial_positions(8, cfg.aperture, cfg.wavelength, InitScheme::UlaCompact);
        Eigen::VectorXd gamma = Eigen::VectorXd::Constant(4, db_to_linear(10.0));
        for (std::uint64_t r = 0;; ++r) {
            const auto paths = normalize_by_noise(draw_scenario(cfg, r), cfg.noise_power);
            const auto h = synthesize_channels(paths, ula, cfg.wavelength);
            if (solve_fixed_position_sdp(ula, h, gamma, 1.0, cfg.tx_power, 0.0, cfg.wavelength)
                    .feasible) {
                feasible_r = r;
                break;
            }
        }
    }
    std::ofstream out("harness_peak.cfg");
    out << "k_users = 4\nn_antennas = 8\nsinr_target_db = 10\nseed = 1\n";
    out.close();
    SweepArgs args;
    args.config_path = "harness_peak.cfg";
    args.schemes = {Scheme::PddJapb, Scheme::FixedUla};
    args.realization = feasible_r;
    args.out_dir = "harness_peak_out";
    REQUIRE(run_sweep_command(args) == 0);
    const auto pdd = read_csv("harness_peak_out/sweep_pdd.csv");
    const auto fa = read_csv("harness_peak_out/sweep_fa.csv");
    // global peak within 1 degree of the target angle (0 deg)
    std::size_t peak = 1;
    for (std::size_t i = 1; i < pdd.size(); ++i)
        if (std::stod(pdd[i][1]) > std::stod(pdd[peak][1]))
            peak = i;
    CHECK(std::abs(std::stod(pdd[peak][0])) <= 1.0);
    // larger optimized aperture: main lobe at most as wide as the compact ULA
    CHECK(lobe_width_deg(pdd) <= lobe_width_deg(fa) + 1e-9);
    std::filesystem::remove_all("harness_peak_out");
    std::remove("harness_peak.cfg");
}
