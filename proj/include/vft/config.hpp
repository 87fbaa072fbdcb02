#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace vft {

/// A problem in the experiment description (bad key, bad value, missing key).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Experiment description, parsed from "key = value" lines ('#' comments).
/// fine_h and coarse_h are required; everything else has the default below.
/// snr_db may be "inf" to disable noise.
struct ExperimentConfig {
    double radius = 1.0;
    double fine_h = 0.0;    // required
    double coarse_h = 0.0;  // required
    int n_electrodes = 32;
    double sigma = 1.0;
    double dipole_x = 0.0;
    double dipole_y = 0.0;
    double qx = 1.0;
    double qy = 0.0;
    double snr_db = 40.0;
    long long seed = 1;
    double alpha = 0.06;
    double beta = 0.016;
    int realizations = 10;
    std::string output_dir = "out";
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace vft
