#include "vft/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "vft/io.hpp"

namespace vft {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double num(const std::string& key, const std::string& val) {
    try {
        return parse_double(val);
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value '" + val + "' for key '" +
                          key + "'");
    }
}

long long integer(const std::string& key, const std::string& val) {
    const double v = num(key, val);
    if (!std::isfinite(v) || v != std::floor(v)) {
        throw ConfigError("config: key '" + key + "' needs an integer, got '" +
                          val + "'");
    }
    return static_cast<long long>(v);
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    bool have_fine = false, have_coarse = false;
    std::set<std::string> seen;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string val = trim(stripped.substr(eq + 1));
        if (key.empty() || val.empty()) {
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key or value");
        }
        if (!seen.insert(key).second) {
            throw ConfigError("config: duplicate key '" + key + "'");
        }

        if (key == "radius") cfg.radius = num(key, val);
        else if (key == "fine_h") { cfg.fine_h = num(key, val); have_fine = true; }
        else if (key == "coarse_h") { cfg.coarse_h = num(key, val); have_coarse = true; }
        else if (key == "n_electrodes") cfg.n_electrodes = static_cast<int>(integer(key, val));
        else if (key == "sigma") cfg.sigma = num(key, val);
        else if (key == "dipole_x") cfg.dipole_x = num(key, val);
        else if (key == "dipole_y") cfg.dipole_y = num(key, val);
        else if (key == "qx") cfg.qx = num(key, val);
        else if (key == "qy") cfg.qy = num(key, val);
        else if (key == "snr_db") cfg.snr_db = num(key, val);
        else if (key == "seed") cfg.seed = integer(key, val);
        else if (key == "alpha") cfg.alpha = num(key, val);
        else if (key == "beta") cfg.beta = num(key, val);
        else if (key == "realizations") cfg.realizations = static_cast<int>(integer(key, val));
        else if (key == "output_dir") cfg.output_dir = val;
        else throw ConfigError("config: unknown key '" + key + "'");
    }

    if (!have_fine) throw ConfigError("config: missing required key 'fine_h'");
    if (!have_coarse) throw ConfigError("config: missing required key 'coarse_h'");

    if (!(cfg.radius > 0.0) || !std::isfinite(cfg.radius)) {
        throw ConfigError("config: radius must be positive");
    }
    for (auto [k, v] : {std::pair<const char*, double>{"fine_h", cfg.fine_h},
                        {"coarse_h", cfg.coarse_h}}) {
        if (!(v > 0.0) || !(v < cfg.radius)) {
            throw ConfigError(std::string("config: ") + k +
                              " must satisfy 0 < h < radius");
        }
    }
    if (cfg.n_electrodes < 3) {
        throw ConfigError("config: n_electrodes must be at least 3");
    }
    if (!(cfg.sigma > 0.0)) throw ConfigError("config: sigma must be positive");
    if (cfg.qx == 0.0 && cfg.qy == 0.0) {
        throw ConfigError("config: dipole moment (qx, qy) must be nonzero");
    }
    if (std::isnan(cfg.snr_db)) throw ConfigError("config: snr_db is NaN");
    if (cfg.alpha < 0.0 || cfg.beta < 0.0) {
        throw ConfigError("config: alpha and beta must be nonnegative");
    }
    if (cfg.realizations < 1) {
        throw ConfigError("config: realizations must be at least 1");
    }
    if (cfg.output_dir.empty()) throw ConfigError("config: empty output_dir");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    return parse_config(in);
}

}  // namespace vft
