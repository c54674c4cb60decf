#include "dnls/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace dnls {

using nlohmann::json;

namespace {

Error field_error(const std::string& field, const std::string& what) {
    return input_error("config: field '" + field + "' " + what);
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& prefix) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key())) throw input_error("config: unknown key '" + prefix + it.key() + "'");
}

double get_number(const json& obj, const std::string& key, const std::string& field, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw field_error(field, "must be a number");
    return v.get<double>();
}

int get_int(const json& obj, const std::string& key, const std::string& field, int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw field_error(field, "must be an integer");
    return v.get<int>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& field, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw field_error(field, "must be a string");
    return v.get<std::string>();
}

std::vector<double> get_numbers(const json& obj, const std::string& key, const std::vector<double>& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_array()) throw field_error(key, "must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw field_error(key + "[" + std::to_string(i) + "]", "must be a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

cplx get_complex(const json& obj, const std::string& key, const std::string& field, cplx fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw field_error(field, "must be a number or [re, im]");
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(12);
    s << v;
    return s.str();
}

bool integral_ratio(double a, double b) {
    const double r = a / b;
    return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
}

}  // namespace

std::string config_key_help() {
    return R"(Config file (JSON); every key is optional:
  profile.kind            "pure_kink" | "perturbed_kink" | "file"
  profile.amplitude       number or [re, im]  (perturbation a)
  profile.center          perturbation center c
  profile.width           perturbation width w  (q0 = tanh x + a exp(-(x-c)^2/w^2))
  profile.path            CSV "x,re_q,im_q" when kind = "file"
  L, dx                   evolution grid [-L, L]; L/dx integer
  dt_factor               dt = dt_factor dx^2 (<= 0.2)
  sponge_width, sponge_rate
  snapshot_times          times at which full snapshots are written
  scatter_L, scatter_dx   grid for the scattering transform of builtin profiles
  spectrum_samples        arc samples for the discrete spectrum search
  z_grid.min, z_grid.max, z_grid.n, z_grid.exclusion_radius
  threads                 scattering worker threads (0 = hardware)
  xi_values               rays x = 2 xi t, |xi| > 1
  t_values                strictly increasing times > 0
  fit_upper_fraction      exponents use the last ceil(f n) of t_values
  output_dir              default for --output)";
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw input_error(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw input_error("config: top level must be a JSON object");
    reject_unknown(j,
                   {"profile", "L", "dx", "dt_factor", "sponge_width", "sponge_rate", "snapshot_times", "scatter_L",
                    "scatter_dx", "spectrum_samples", "z_grid", "threads", "xi_values", "t_values",
                    "fit_upper_fraction", "output_dir"},
                   "");
    RunConfig c;
    if (j.contains("profile")) {
        const json& p = j.at("profile");
        if (!p.is_object()) throw field_error("profile", "must be an object");
        reject_unknown(p, {"kind", "amplitude", "center", "width", "path"}, "profile.");
        c.profile.kind = get_string(p, "kind", "profile.kind", c.profile.kind);
        c.profile.amplitude = get_complex(p, "amplitude", "profile.amplitude", c.profile.amplitude);
        c.profile.center = get_number(p, "center", "profile.center", c.profile.center);
        c.profile.width = get_number(p, "width", "profile.width", c.profile.width);
        c.profile.path = get_string(p, "path", "profile.path", c.profile.path);
    }
    c.L = get_number(j, "L", "L", c.L);
    c.dx = get_number(j, "dx", "dx", c.dx);
    c.dt_factor = get_number(j, "dt_factor", "dt_factor", c.dt_factor);
    c.sponge_width = get_number(j, "sponge_width", "sponge_width", c.sponge_width);
    c.sponge_rate = get_number(j, "sponge_rate", "sponge_rate", c.sponge_rate);
    c.snapshot_times = get_numbers(j, "snapshot_times", c.snapshot_times);
    c.scatter_L = get_number(j, "scatter_L", "scatter_L", c.scatter_L);
    c.scatter_dx = get_number(j, "scatter_dx", "scatter_dx", c.scatter_dx);
    c.spectrum_samples = get_int(j, "spectrum_samples", "spectrum_samples", c.spectrum_samples);
    if (j.contains("z_grid")) {
        const json& z = j.at("z_grid");
        if (!z.is_object()) throw field_error("z_grid", "must be an object");
        reject_unknown(z, {"min", "max", "n", "exclusion_radius"}, "z_grid.");
        c.z_grid.z_min = get_number(z, "min", "z_grid.min", c.z_grid.z_min);
        c.z_grid.z_max = get_number(z, "max", "z_grid.max", c.z_grid.z_max);
        c.z_grid.n = get_int(z, "n", "z_grid.n", c.z_grid.n);
        c.z_grid.exclusion_radius = get_number(z, "exclusion_radius", "z_grid.exclusion_radius", c.z_grid.exclusion_radius);
    }
    c.threads = get_int(j, "threads", "threads", c.threads);
    c.xi_values = get_numbers(j, "xi_values", c.xi_values);
    c.t_values = get_numbers(j, "t_values", c.t_values);
    c.fit_upper_fraction = get_number(j, "fit_upper_fraction", "fit_upper_fraction", c.fit_upper_fraction);
    c.output_dir = get_string(j, "output_dir", "output_dir", c.output_dir);
    validate_config(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("config not found: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& c) {
    json j;
    j["profile"] = {{"kind", c.profile.kind},
                    {"amplitude", {c.profile.amplitude.real(), c.profile.amplitude.imag()}},
                    {"center", c.profile.center},
                    {"width", c.profile.width},
                    {"path", c.profile.path}};
    j["L"] = c.L;
    j["dx"] = c.dx;
    j["dt_factor"] = c.dt_factor;
    j["sponge_width"] = c.sponge_width;
    j["sponge_rate"] = c.sponge_rate;
    j["snapshot_times"] = c.snapshot_times;
    j["scatter_L"] = c.scatter_L;
    j["scatter_dx"] = c.scatter_dx;
    j["spectrum_samples"] = c.spectrum_samples;
    j["z_grid"] = {{"min", c.z_grid.z_min},
                   {"max", c.z_grid.z_max},
                   {"n", c.z_grid.n},
                   {"exclusion_radius", c.z_grid.exclusion_radius}};
    j["threads"] = c.threads;
    j["xi_values"] = c.xi_values;
    j["t_values"] = c.t_values;
    j["fit_upper_fraction"] = c.fit_upper_fraction;
    j["output_dir"] = c.output_dir;
    return j.dump(2) + "\n";
}

void validate_config(const RunConfig& c) {
    const auto& p = c.profile;
    if (p.kind != "pure_kink" && p.kind != "perturbed_kink" && p.kind != "file")
        throw field_error("profile.kind", "must be pure_kink, perturbed_kink or file (got '" + p.kind + "')");
    if (!(p.width > 0.0)) throw field_error("profile.width", "must be positive");
    if (p.kind == "file" && p.path.empty()) throw field_error("profile.path", "is required when kind = file");
    if (!(c.L > 0.0)) throw field_error("L", "must be positive");
    if (!(c.dx > 0.0)) throw field_error("dx", "must be positive");
    if (!integral_ratio(c.L, c.dx)) throw field_error("dx", "must divide L (L/dx integer)");
    if (!(c.dt_factor > 0.0 && c.dt_factor <= 0.2))
        throw field_error("dt_factor", "must lie in (0, 0.2] (stability limit dt <= 0.2 dx^2)");
    if (!(c.sponge_width > 0.0)) throw field_error("sponge_width", "must be positive");
    if (!(c.sponge_rate >= 0.0)) throw field_error("sponge_rate", "must be >= 0");
    for (std::size_t i = 0; i < c.snapshot_times.size(); ++i)
        if (!(c.snapshot_times[i] >= 0.0) || (i > 0 && !(c.snapshot_times[i] > c.snapshot_times[i - 1])))
            throw field_error("snapshot_times[" + std::to_string(i) + "]", "must be >= 0 and strictly increasing");
    if (!(c.scatter_L > 0.0)) throw field_error("scatter_L", "must be positive");
    if (!(c.scatter_dx > 0.0)) throw field_error("scatter_dx", "must be positive");
    if (c.spectrum_samples < 16) throw field_error("spectrum_samples", "must be >= 16");
    try {
        c.z_grid.validate();
    } catch (const Error& e) {
        throw input_error(std::string("config: ") + e.what());
    }
    if (c.threads < 0) throw field_error("threads", "must be >= 0");
    if (c.xi_values.empty()) throw field_error("xi_values", "must not be empty");
    for (std::size_t i = 0; i < c.xi_values.size(); ++i)
        if (!(std::abs(c.xi_values[i]) > 1.0 + 1e-9))
            throw field_error("xi_values[" + std::to_string(i) + "]",
                              "= " + fmt(c.xi_values[i]) + " is inside the solitonic region |xi| <= 1 (needs |xi| > 1)");
    if (c.t_values.empty()) throw field_error("t_values", "must not be empty");
    for (std::size_t i = 0; i < c.t_values.size(); ++i) {
        if (!(c.t_values[i] > 0.0)) throw field_error("t_values[" + std::to_string(i) + "]", "must be > 0");
        if (i > 0 && !(c.t_values[i] > c.t_values[i - 1]))
            throw field_error("t_values[" + std::to_string(i) + "]", "breaks strict increase");
    }
    if (!(c.fit_upper_fraction > 0.0 && c.fit_upper_fraction <= 1.0))
        throw field_error("fit_upper_fraction", "must lie in (0, 1]");
    double xi_max = 0.0;
    for (double xi : c.xi_values) xi_max = std::max(xi_max, std::abs(xi));
    const double need = 2.0 * xi_max * c.t_values.back() + 3.0 * c.sponge_width;
    if (c.L < need)
        throw field_error("L", "= " + fmt(c.L) + " is too small: rays need L >= 2 max|xi| max(t) + 3 sponge_width = " +
                                   fmt(need));
    if (c.output_dir.empty()) throw field_error("output_dir", "must not be empty");
}

}  // namespace dnls
