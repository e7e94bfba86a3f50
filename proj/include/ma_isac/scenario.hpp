// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#pragma once

#include "ma_isac/rng.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ma_isac {

struct PddKnobs {
    double rho0 = 1.0;        // initial penalty factor
    double c0 = 0.6;          // geometric decay, 0 < c0 < 1
    int max_outer = 30;
    int max_inner = 15;
    double delta_in = 1e-5;   // relative objective change, inner loop
    double delta_out = 1e-5;  // max |Q - V|, noise-normalized units
};

struct PgdKnobs {
    double step0 = 0.0;       // 0 => auto: 0.1*lambda/(|grad| + eps)
    double shrink = 0.5;
    int max_backtracks = 30;
    int max_iters = 200;
    double armijo_c = 0.1;    // sufficient-decrease coefficient (Eq-16 form)
};

// All physical quantities in linear units (watts, meters, ratios); dB/dBm
// conversion happens at ingestion.
struct ScenarioConfig {
    int num_users = 4;
    int num_antennas = 8;
    double wavelength = 0.1;             // m
    double aperture = 1.5;               // m (config key is in units of lambda)
    double tx_power = 1.0;               // W
    double noise_power = 1e-11;          // W
    std::vector<double> sinr_targets;    // linear, one per user
    double target_angle = 0.0;           // rad
    int paths_per_user = 12;
    double pathloss_ref = 1e-4;          // linear
    double pathloss_exp = 2.8;
    double dist_min = 50.0;              // m
    double dist_max = 150.0;             // m
    PddKnobs pdd;
    PgdKnobs pgd;
    double sdp_tol = 1e-8;
    std::uint64_t master_seed = 1;

    // throws ConfigError listing every violated invariant
    void validate() const;
};

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Per-user multipath parameters; the channel is re-synthesized from these
// whenever the antenna positions move.
struct PathSet {
    std::vector<std::complex<double>> gains;  // sigma_{k,l}
    std::vector<double> angles;               // theta_{k,l}, rad, |.| < pi/2
    double distance = 0.0;                    // d_k, m
};

// Flat key-value config file ("key = value", '#' comments). Unknown keys and
// invariant violations are reported together in the exception message.
ScenarioConfig load_config(const std::string& path);

ScenarioConfig config_from_map(const std::map<std::string, std::string>& kv);

// d_k ~ U[dist_min, dist_max]; theta ~ U(-pi/2, pi/2);
// sigma ~ CN(0, pathloss_ref * d^-alpha / paths_per_user).
// Deterministic given (master_seed, realization_index).
std::vector<PathSet> draw_scenario(const ScenarioConfig& cfg, std::uint64_t realization_index);

// Scale all gains by 1/sqrt(noise_power); downstream code then uses unit
// noise power. SINR and beampattern values are invariant under this scaling.
std::vector<PathSet> normalize_by_noise(std::vector<PathSet> paths, double noise_power);

} // namespace ma_isac
