#pragma once

#include <string>
#include <vector>

#include "dnls/numerics.hpp"
#include "dnls/scattering.hpp"

namespace dnls {

struct ProfileConfig {
    std::string kind = "perturbed_kink";  // pure_kink | perturbed_kink | file
    cplx amplitude{0.1, 0.0};
    double center = 0.0;
    double width = 2.0;
    std::string path;  // CSV "x,re_q,im_q" when kind == file

    bool operator==(const ProfileConfig&) const = default;
};

struct RunConfig {
    ProfileConfig profile;
    // evolution
    double L = 180.0;
    double dx = 0.05;
    double dt_factor = 0.2;
    double sponge_width = 10.0;
    double sponge_rate = 2.0;
    std::vector<double> snapshot_times;
    // scattering
    double scatter_L = 25.0;
    double scatter_dx = 0.01;
    int spectrum_samples = 64;
    ZGridSpec z_grid;
    int threads = 0;
    // rays
    std::vector<double> xi_values{1.5};
    std::vector<double> t_values{10.0, 15.0, 22.0, 33.0, 50.0};
    double fit_upper_fraction = 0.5;  // exponents use the last ceil(f n) times
    std::string output_dir = "out";

    bool operator==(const RunConfig&) const = default;
};

// Key reference printed by --help.
std::string config_key_help();

// Missing keys keep their defaults; unknown keys are rejected.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& c);
void validate_config(const RunConfig& c);

}  // namespace dnls
