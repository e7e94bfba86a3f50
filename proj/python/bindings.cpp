// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#include "ma_isac/baselines.hpp"
#include "ma_isac/channel.hpp"
#include "ma_isac/conic.hpp"
#include "ma_isac/geometry.hpp"
#include "ma_isac/harness.hpp"
#include "ma_isac/pdd.hpp"
#include "ma_isac/pgd.hpp"
#include "ma_isac/scenario.hpp"
#include "ma_isac/sdr.hpp"
#include "ma_isac/units.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ma_isac;

PYBIND11_MODULE(_core, m) {
    m.doc() = "movable-antenna ISAC beampattern optimization (C++ core)";

    m.def("db_to_linear", &db_to_linear);
    m.def("linear_to_db", &linear_to_db);
    m.def("dbm_to_watts", &dbm_to_watts);
    m.def("watts_to_dbm", &watts_to_dbm);

    py::class_<PddKnobs>(m, "PddKnobs")
        .def(py::init<>())
        .def_readwrite("rho0", &PddKnobs::rho0)
        .def_readwrite("c0", &PddKnobs::c0)
        .def_readwrite("max_outer", &PddKnobs::max_outer)
        .def_readwrite("max_inner", &PddKnobs::max_inner)
        .def_readwrite("delta_in", &PddKnobs::delta_in)
        .def_readwrite("delta_out", &PddKnobs::delta_out);

    py::class_<PgdKnobs>(m, "PgdKnobs")
        .def(py::init<>())
        .def_readwrite("step0", &PgdKnobs::step0)
        .def_readwrite("shrink", &PgdKnobs::shrink)
        .def_readwrite("max_backtracks", &PgdKnobs::max_backtracks)
        .def_readwrite("max_iters", &PgdKnobs::max_iters)
        .def_readwrite("armijo_c", &PgdKnobs::armijo_c);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("num_users", &ScenarioConfig::num_users)
        .def_readwrite("num_antennas", &ScenarioConfig::num_antennas)
        .def_readwrite("wavelength", &ScenarioConfig::wavelength)
        .def_readwrite("aperture", &ScenarioConfig::aperture)
        .def_readwrite("tx_power", &ScenarioConfig::tx_power)
        .def_readwrite("noise_power", &ScenarioConfig::noise_power)
        .def_readwrite("sinr_targets", &ScenarioConfig::sinr_targets)
        .def_readwrite("target_angle", &ScenarioConfig::target_angle)
        .def_readwrite("paths_per_user", &ScenarioConfig::paths_per_user)
        .def_readwrite("pathloss_ref", &ScenarioConfig::pathloss_ref)
        .def_readwrite("pathloss_exp", &ScenarioConfig::pathloss_exp)
        .def_readwrite("dist_min", &ScenarioConfig::dist_min)
        .def_readwrite("dist_max", &ScenarioConfig::dist_max)
        .def_readwrite("pdd", &ScenarioConfig::pdd)
        .def_readwrite("pgd", &ScenarioConfig::pgd)
        .def_readwrite("sdp_tol", &ScenarioConfig::sdp_tol)
        .def_readwrite("master_seed", &ScenarioConfig::master_seed)
        .def("validate", &ScenarioConfig::validate);

    py::class_<PathSet>(m, "PathSet")
        .def(py::init<>())
        .def_readwrite("gains", &PathSet::gains)
        .def_readwrite("angles", &PathSet::angles)
        .def_readwrite("distance", &PathSet::distance);

    m.def("load_config", &load_config, py::arg("path"));
    m.def("draw_scenario", &draw_scenario, py::arg("config"), py::arg("realization_index"));
    m.def("normalize_by_noise", &normalize_by_noise, py::arg("paths"), py::arg("noise_power"));

    py::enum_<InitScheme>(m, "InitScheme")
        .value("UniformSpread", InitScheme::UniformSpread)
        .value("UlaCompact", InitScheme::UlaCompact);

    m.def("is_feasible", &is_feasible, py::arg("t"), py::arg("aperture"), py::arg("wavelength"),
          py::arg("tol") = 1e-9);
    m.def("project_positions", &project_positions);
    m.def("initial_positions", &initial_positions);
    m.def(
        "sample_random_positions",
        [](std::uint64_t seed, int n, double aperture, double wavelength) {
            Rng rng(seed);
            return sample_random_positions(rng, n, aperture, wavelength);
        },
        py::arg("seed"), py::arg("num_antennas"), py::arg("aperture"), py::arg("wavelength"));

    m.def("steering_vector", &steering_vector);
    m.def("synthesize_channel", &synthesize_channel);
    m.def("synthesize_channels", &synthesize_channels);
    m.def("sinr", &sinr);
    m.def("beampattern_gain", &beampattern_gain);
    m.def("beampattern_sweep", &beampattern_sweep);
    m.def("coupling_v", &coupling_v);
    m.def("coupling_v_lifted", &coupling_v_lifted);
    m.def("al_objective", &al_objective);
    m.def("al_objective_lifted", &al_objective_lifted);
    m.def("violation_inf", &violation_inf);

    py::enum_<ConicStatus>(m, "ConicStatus")
        .value("Optimal", ConicStatus::Optimal)
        .value("PrimalInfeasible", ConicStatus::PrimalInfeasible)
        .value("DualInfeasible", ConicStatus::DualInfeasible)
        .value("MaxIters", ConicStatus::MaxIters)
        .value("NumericalProblem", ConicStatus::NumericalProblem);

    py::class_<ConicSettings>(m, "ConicSettings")
        .def(py::init<>())
        .def_readwrite("max_iters", &ConicSettings::max_iters)
        .def_readwrite("feas_tol", &ConicSettings::feas_tol)
        .def_readwrite("rel_gap_tol", &ConicSettings::rel_gap_tol);

    py::class_<RankOneExtraction>(m, "RankOneExtraction")
        .def_readonly("w", &RankOneExtraction::w)
        .def_readonly("ratio", &RankOneExtraction::ratio)
        .def_readonly("certified", &RankOneExtraction::certified)
        .def_readonly("is_zero", &RankOneExtraction::is_zero);
    m.def("extract_rank_one", &extract_rank_one, py::arg("w_lifted"), py::arg("tol") = 1e-6);

    py::class_<InnerSdpSolution>(m, "InnerSdpSolution")
        .def_readonly("status", &InnerSdpSolution::status)
        .def_readonly("w_lifted", &InnerSdpSolution::w_lifted)
        .def_readonly("w_columns", &InnerSdpSolution::w_columns)
        .def_readonly("q", &InnerSdpSolution::q)
        .def_readonly("objective", &InnerSdpSolution::objective)
        .def_readonly("rank_ratio", &InnerSdpSolution::rank_ratio)
        .def_readonly("rank_certified", &InnerSdpSolution::rank_certified)
        .def_readonly("iterations", &InnerSdpSolution::iterations);
    m.def("solve_inner_sdp", &solve_inner_sdp, py::arg("t"), py::arg("xi"), py::arg("rho"),
          py::arg("h"), py::arg("gamma"), py::arg("noise_power"), py::arg("tx_power"),
          py::arg("theta_s"), py::arg("wavelength"), py::arg("settings") = ConicSettings{});

    py::class_<FixedSdpResult>(m, "FixedSdpResult")
        .def_readonly("status", &FixedSdpResult::status)
        .def_readonly("feasible", &FixedSdpResult::feasible)
        .def_readonly("w_lifted", &FixedSdpResult::w_lifted)
        .def_readonly("w_columns", &FixedSdpResult::w_columns)
        .def_readonly("rank_ratio", &FixedSdpResult::rank_ratio)
        .def_readonly("gain", &FixedSdpResult::gain);
    m.def("solve_fixed_position_sdp", &solve_fixed_position_sdp, py::arg("t"), py::arg("h"),
          py::arg("gamma"), py::arg("noise_power"), py::arg("tx_power"), py::arg("theta_s"),
          py::arg("wavelength"), py::arg("settings") = ConicSettings{});

    m.def("gradient_positions", &gradient_positions);

    py::enum_<PgdStop>(m, "PgdStop")
        .value("Converged", PgdStop::Converged)
        .value("MaxIters", PgdStop::MaxIters)
        .value("StepRejected", PgdStop::StepRejected)
        .value("ZeroGradient", PgdStop::ZeroGradient);
    py::class_<PgdTrace>(m, "PgdTrace")
        .def_readonly("f_values", &PgdTrace::f_values)
        .def_readonly("steps", &PgdTrace::steps)
        .def_readonly("iterations", &PgdTrace::iterations)
        .def_readonly("reason", &PgdTrace::reason);
    m.def("run_pgd", &run_pgd);

    py::class_<PddOptions>(m, "PddOptions")
        .def(py::init<>())
        .def_readwrite("init", &PddOptions::init)
        .def_readwrite("enable_pgd", &PddOptions::enable_pgd)
        .def_readwrite("collect_trace", &PddOptions::collect_trace)
        .def_readwrite("num_starts", &PddOptions::num_starts);

    py::class_<PddResult>(m, "PddResult")
        .def_readonly("t", &PddResult::t)
        .def_readonly("w_columns", &PddResult::w_columns)
        .def_readonly("sinr_db", &PddResult::sinr_db)
        .def_readonly("sinr_slack_db", &PddResult::sinr_slack_db)
        .def_readonly("gain", &PddResult::gain)
        .def_readonly("gain_db_over_pt", &PddResult::gain_db_over_pt)
        .def_readonly("final_violation", &PddResult::final_violation)
        .def_readonly("feasible", &PddResult::feasible)
        .def_readonly("converged", &PddResult::converged)
        .def_readonly("verdict", &PddResult::verdict)
        .def_readonly("outer_iters", &PddResult::outer_iters)
        .def_readonly("inner_iters_total", &PddResult::inner_iters_total)
        .def_readonly("violation_history", &PddResult::violation_history)
        .def_readonly("rank_certified_all", &PddResult::rank_certified_all);
    m.def("run_pdd", &run_pdd, py::arg("config"), py::arg("paths"),
          py::arg("options") = PddOptions{});
    m.def("audit_feasibility", &audit_feasibility);

    py::enum_<Scheme>(m, "Scheme")
        .value("PddJapb", Scheme::PddJapb)
        .value("FixedUla", Scheme::FixedUla)
        .value("RandomMa", Scheme::RandomMa)
        .value("UpperBound", Scheme::UpperBound);
    py::class_<BaselineOptions>(m, "BaselineOptions")
        .def(py::init<>())
        .def_readwrite("fa_center", &BaselineOptions::fa_center)
        .def_readwrite("pdd", &BaselineOptions::pdd);
    m.def("run_baseline", &run_baseline, py::arg("scheme"), py::arg("config"),
          py::arg("realization"), py::arg("options") = BaselineOptions{});
}
