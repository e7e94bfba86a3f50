// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#include "ma_isac/scenario.hpp"

#include "ma_isac/units.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ma_isac {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& value, std::vector<std::string>& errors) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        errors.push_back(key + ": cannot parse '" + value + "' as a number");
        return 0.0;
    }
}

std::vector<double> parse_number_list(const std::string& key, const std::string& value,
                                      std::vector<std::string>& errors) {
    std::vector<double> out;
    std::string item;
    std::stringstream ss(value);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            continue;
        out.push_back(parse_number(key, item, errors));
    }
    if (out.empty())
        errors.push_back(key + ": empty value");
    return out;
}

} // namespace

void ScenarioConfig::validate() const {
    std::vector<std::string> errors;
    if (num_users < 1)
        errors.push_back("k_users: must be a positive integer");
    if (num_antennas < 1)
        errors.push_back("n_antennas: must be a positive integer");
    if (num_antennas < num_users)
        errors.push_back("n_antennas: requires n_antennas >= k_users");
    if (!(wavelength > 0.0))
        errors.push_back("wavelength_m: must be > 0");
    if (wavelength > 0.0 && aperture < (num_antennas - 1) * wavelength / 2.0 - 1e-12)
        errors.push_back("aperture_lambda: spacing constraint infeasible, requires L >= (n_antennas-1)*lambda/2");
    if (!(tx_power >= 0.0))
        errors.push_back("tx_power_dbm: transmit power must be finite");
    if (!(noise_power > 0.0))
        errors.push_back("noise_dbm: noise power must be > 0");
    if (sinr_targets.size() != static_cast<std::size_t>(num_users))
        errors.push_back("sinr_target_db: needs one target (scalar) or k_users entries");
    for (double g : sinr_targets)
        if (!(g >= 0.0) || !std::isfinite(g))
            errors.push_back("sinr_target_db: targets must be finite (linear value >= 0)");
    if (!(std::abs(target_angle) < M_PI / 2.0))
        errors.push_back("target_angle_deg: must lie in (-90, 90)");
    if (paths_per_user < 1)
        errors.push_back("paths_per_user: must be a positive integer");
    if (!(pathloss_ref > 0.0))
        errors.push_back("pathloss_ref_db: must be finite");
    if (!(dist_min > 0.0) || !(dist_max >= dist_min))
        errors.push_back("dist_min_m/dist_max_m: need 0 < dist_min <= dist_max");
    if (!(pdd.rho0 > 0.0))
        errors.push_back("rho0: must be > 0");
    if (!(pdd.c0 > 0.0 && pdd.c0 < 1.0))
        errors.push_back("c0: must satisfy 0 < c0 < 1");
    if (pdd.max_outer < 1 || pdd.max_inner < 1)
        errors.push_back("max_outer/max_inner: must be >= 1");
    if (!(pdd.delta_in > 0.0) || !(pdd.delta_out > 0.0))
        errors.push_back("delta_in/delta_out: must be > 0");
    if (!(pgd.shrink > 0.0 && pgd.shrink < 1.0))
        errors.push_back("pgd_shrink: must satisfy 0 < shrink < 1");
    if (pgd.max_backtracks < 1 || pgd.max_iters < 1)
        errors.push_back("pgd_max_backtracks/pgd_max_iters: must be >= 1");
    if (!(sdp_tol > 0.0))
        errors.push_back("sdp_tol: must be > 0");
    if (!errors.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors)
            msg += "\n  - " + e;
        throw ConfigError(msg);
    }
}

ScenarioConfig config_from_map(const std::map<std::string, std::string>& kv) {
    ScenarioConfig cfg;
    std::vector<std::string> errors;
    double aperture_lambda = 15.0;
    double tx_dbm = 30.0;
    double noise_dbm = -80.0;
    std::vector<double> sinr_db{10.0};
    double target_deg = 0.0;
    double pathloss_db = -40.0;

    for (const auto& [key, raw] : kv) {
        const std::string value = trim(raw);
        if (key == "k_users")
            cfg.num_users = static_cast<int>(parse_number(key, value, errors));
        else if (key == "n_antennas")
            cfg.num_antennas = static_cast<int>(parse_number(key, value, errors));
        else if (key == "wavelength_m")
            cfg.wavelength = parse_number(key, value, errors);
        else if (key == "aperture_lambda")
            aperture_lambda = parse_number(key, value, errors);
        else if (key == "tx_power_dbm")
            tx_dbm = parse_number(key, value, errors);
        else if (key == "noise_dbm")
            noise_dbm = parse_number(key, value, errors);
        else if (key == "sinr_target_db")
            sinr_db = parse_number_list(key, value, errors);
        else if (key == "target_angle_deg")
            target_deg = parse_number(key, value, errors);
        else if (key == "paths_per_user")
            cfg.paths_per_user = static_cast<int>(parse_number(key, value, errors));
        else if (key == "pathloss_ref_db")
            pathloss_db = parse_number(key, value, errors);
        else if (key == "pathloss_exp")
            cfg.pathloss_exp = parse_number(key, value, errors);
        else if (key == "dist_min_m")
            cfg.dist_min = parse_number(key, value, errors);
        else if (key == "dist_max_m")
            cfg.dist_max = parse_number(key, value, errors);
        else if (key == "rho0")
            cfg.pdd.rho0 = parse_number(key, value, errors);
        else if (key == "c0")
            cfg.pdd.c0 = parse_number(key, value, errors);
        else if (key == "max_outer")
            cfg.pdd.max_outer = static_cast<int>(parse_number(key, value, errors));
        else if (key == "max_inner")
            cfg.pdd.max_inner = static_cast<int>(parse_number(key, value, errors));
        else if (key == "delta_in")
            cfg.pdd.delta_in = parse_number(key, value, errors);
        else if (key == "delta_out")
            cfg.pdd.delta_out = parse_number(key, value, errors);
        else if (key == "pgd_step0")
            cfg.pgd.step0 = parse_number(key, value, errors);
        else if (key == "pgd_shrink")
            cfg.pgd.shrink = parse_number(key, value, errors);
        else if (key == "pgd_max_backtracks")
            cfg.pgd.max_backtracks = static_cast<int>(parse_number(key, value, errors));
        else if (key == "pgd_max_iters")
            cfg.pgd.max_iters = static_cast<int>(parse_number(key, value, errors));
        else if (key == "pgd_armijo_c")
            cfg.pgd.armijo_c = parse_number(key, value, errors);
        else if (key == "sdp_tol")
            cfg.sdp_tol = parse_number(key, value, errors);
        else if (key == "seed")
            cfg.master_seed = static_cast<std::uint64_t>(parse_number(key, value, errors));
        else
            errors.push_back(key + ": unknown configuration key");
    }

    if (!errors.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors)
            msg += "\n  - " + e;
        throw ConfigError(msg);
    }

    cfg.aperture = aperture_lambda * cfg.wavelength;
    cfg.tx_power = dbm_to_watts(tx_dbm);
    cfg.noise_power = dbm_to_watts(noise_dbm);
    cfg.target_angle = deg_to_rad(target_deg);
    cfg.pathloss_ref = db_to_linear(pathloss_db);
    cfg.sinr_targets.clear();
    if (sinr_db.size() == 1)
        cfg.sinr_targets.assign(cfg.num_users > 0 ? cfg.num_users : 1, db_to_linear(sinr_db[0]));
    else
        for (double g : sinr_db)
            cfg.sinr_targets.push_back(db_to_linear(g));

    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    std::vector<std::string> errors;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            errors.push_back("line " + std::to_string(lineno) + ": empty key or value");
            continue;
        }
        if (!kv.emplace(key, value).second)
            errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    if (!errors.empty()) {
        std::string msg = "cannot parse " + path + ":";
        for (const auto& e : errors)
            msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    return config_from_map(kv);
}

std::vector<PathSet> draw_scenario(const ScenarioConfig& cfg, std::uint64_t realization_index) {
    std::vector<PathSet> paths(cfg.num_users);
    for (int k = 0; k < cfg.num_users; ++k) {
        // independent stream per (realization, user); purpose tag 0 = channels
        Rng rng = Rng::from_stream(cfg.master_seed, realization_index, static_cast<std::uint64_t>(k) << 8);
        PathSet& p = paths[k];
        p.distance = rng.uniform(cfg.dist_min, cfg.dist_max);
        const double var =
            cfg.pathloss_ref * std::pow(p.distance, -cfg.pathloss_exp) / cfg.paths_per_user;
        p.gains.resize(cfg.paths_per_user);
        p.angles.resize(cfg.paths_per_user);
        for (int l = 0; l < cfg.paths_per_user; ++l) {
            p.angles[l] = rng.uniform(-M_PI / 2.0, M_PI / 2.0);
            p.gains[l] = rng.cnormal(var);
        }
    }
    return paths;
}

std::vector<PathSet> normalize_by_noise(std::vector<PathSet> paths, double noise_power) {
    if (!(noise_power > 0.0))
        throw std::invalid_argument("normalize_by_noise: noise power must be > 0");
    const double scale = 1.0 / std::sqrt(noise_power);
    for (auto& p : paths)
        for (auto& g : p.gains)
            g *= scale;
    return paths;
}

} // namespace ma_isac
