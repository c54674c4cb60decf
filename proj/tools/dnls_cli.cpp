#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dnls/config.hpp"
#include "dnls/phase.hpp"
#include "dnls/pipeline.hpp"
#include "json.hpp"

using namespace dnls;
namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config_path;
    std::string output;
};

RunConfig load(const Common& o) {
    RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    if (o.config_path.empty()) validate_config(c);
    if (!o.output.empty()) c.output_dir = o.output;
    return c;
}

fs::path out_dir(const RunConfig& c) {
    fs::path d(c.output_dir);
    std::error_code ec;
    fs::create_directories(d, ec);
    if (ec) throw input_error("cannot create output directory " + d.string() + ": " + ec.message());
    return d;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw input_error("cannot write " + p.string());
    return f;
}

int cmd_scatter(const Common& o) {
    const RunConfig c = load(o);
    const ScatteringResult s = run_scatter(c);
    const fs::path p = out_dir(c) / "scattering.json";
    auto f = open_out(p);
    write_scattering_json(f, s);
    std::printf("unitarity max violation: %.3e\n", s.max_unitarity_violation);
    std::printf("max |r|: %.3e\n", s.max_abs_r);
    std::printf("eigenvalues: %zu\n", s.spectrum.eigenvalues.size());
    for (cplx z : s.spectrum.eigenvalues) std::printf("  z = %.10f %+.10f i\n", z.real(), z.imag());
    for (const auto& w : s.spectrum.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::printf("wrote %s\n", p.string().c_str());
    return 0;
}

int cmd_asym(const Common& o, std::string scattering) {
    const RunConfig c = load(o);
    const fs::path dir = out_dir(c);
    if (scattering.empty()) scattering = (dir / "scattering.json").string();
    const ScatteringResult s = read_scattering_json(scattering);
    const AsymptoticRun run = run_asym(c, s.table);
    auto f = open_out(dir / "asymptotic.csv");
    write_asymptotic_csv(f, run.rows);
    auto g = open_out(dir / "asymptotic_summary.json");
    write_asym_summary_json(g, run.summary);
    for (const auto& r : run.summary) {
        std::printf("xi = %g: alpha(inf) = %.10e, |exp(-i alpha) - T(inf)^-2| = %.2e\n", r.xi, r.alpha_infinity,
                    r.identity_error);
        if (r.h_ratio_mean)
            std::printf("  closed-form h / E1 (xi1 term): %.8f %+.8f i (spread %.1e; -1/sqrt(2 pi) = %.8f)\n",
                        r.h_ratio_mean->real(), r.h_ratio_mean->imag(), r.h_ratio_spread, -1.0 / std::sqrt(2.0 * pi));
        if (r.q_decay_exponent) std::printf("  ||q_asy| - 1| fitted decay exponent: %.4f\n", *r.q_decay_exponent);
    }
    std::printf("wrote %s\n", (dir / "asymptotic.csv").string().c_str());
    return 0;
}

int cmd_evolve(const Common& o) {
    const RunConfig c = load(o);
    const fs::path dir = out_dir(c);
    const EvolveRun run = run_evolve(c, [](double t) { std::fprintf(stderr, "evolve: t = %g\n", t); });
    for (const auto& r : run.rays) {
        auto f = open_out(dir / ray_file_name(r.xi));
        write_ray_csv(f, r.xi, r.t, r.q);
        std::printf("wrote %s\n", (dir / ray_file_name(r.xi)).string().c_str());
    }
    for (const auto& s : run.snapshots) {
        auto f = open_out(dir / snapshot_file_name(s.t));
        write_snapshot_csv(f, s.grid);
    }
    return 0;
}

int cmd_compare(const Common& o, std::string asym, std::vector<std::string> rays) {
    const RunConfig c = load(o);
    const fs::path dir = out_dir(c);
    if (asym.empty()) asym = (dir / "asymptotic.csv").string();
    if (rays.empty())
        for (double xi : c.xi_values) rays.push_back((dir / ray_file_name(xi)).string());
    std::vector<RayTrace> traces;
    for (const auto& p : rays) traces.push_back(read_ray_csv(p));
    const ComparisonReport r = compare_rays(read_asymptotic_csv(asym), traces, c.fit_upper_fraction);
    auto f = open_out(dir / "comparison.csv");
    write_comparison_csv(f, r);
    auto g = open_out(dir / "comparison.json");
    write_comparison_json(g, r);
    for (const auto& ray : r.rays) {
        auto num = [](const std::optional<double>& v) { return v ? std::to_string(*v) : std::string("degenerate"); };
        std::printf("xi = %g: p_leading = %s, p_corrected = %s, max err leading %.3e, corrected %.3e%s -> %s\n", ray.xi,
                    num(ray.p_leading).c_str(), num(ray.p_corrected).c_str(), ray.max_err_leading, ray.max_err_corrected,
                    ray.exact_match ? " (exact match)" : "", ray.pass ? "pass" : "fail");
    }
    return 0;
}

int cmd_signature(const Common& o, double xi, double extent, int n) {
    const RunConfig c = load(o);
    char name[64];
    std::snprintf(name, sizeof name, "signature_xi_%g.csv", xi);
    auto f = open_out(out_dir(c) / name);
    write_signature_grid(f, xi, -extent, extent, -extent, extent, n, n);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Long-time asymptotics of the defocusing NLS equation with kink boundary values"};
    app.footer(config_key_help());
    app.set_version_flag("--version", std::string("dnls ") + DNLS_VERSION);
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* s) {
        s->add_option("--config", common.config_path, "JSON run configuration");
        s->add_option("--output", common.output, "output directory (overrides output_dir)");
    };
    auto* scatter = app.add_subcommand("scatter", "reflection table and discrete spectrum -> scattering.json");
    add_common(scatter);
    auto* asym = app.add_subcommand("asym", "asymptotic profile along the rays -> asymptotic.csv");
    add_common(asym);
    std::string scattering_file;
    asym->add_option("--scattering", scattering_file, "scattering JSON (default OUTPUT/scattering.json)");
    auto* evolve = app.add_subcommand("evolve", "direct PDE evolution -> ray_xi_<xi>.csv");
    add_common(evolve);
    auto* compare = app.add_subcommand("compare", "PDE versus asymptotics -> comparison.csv/json");
    add_common(compare);
    std::string asym_file;
    std::vector<std::string> ray_files;
    compare->add_option("--asym", asym_file, "asymptotic CSV (default OUTPUT/asymptotic.csv)");
    compare->add_option("--ray", ray_files, "ray CSV files (default OUTPUT/ray_xi_<xi>.csv per configured xi)");
    auto* signature = app.add_subcommand("signature", "sign table of Re(2 i theta) -> signature_xi_<xi>.csv");
    add_common(signature);
    double sig_xi = 1.5, sig_extent = 3.0;
    int sig_n = 121;
    signature->add_option("--xi", sig_xi, "ray parameter")->capture_default_str();
    signature->add_option("--extent", sig_extent, "half width of the square window")->capture_default_str();
    signature->add_option("--n", sig_n, "lattice points per side")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*scatter) return cmd_scatter(common);
        if (*asym) return cmd_asym(common, scattering_file);
        if (*evolve) return cmd_evolve(common);
        if (*compare) return cmd_compare(common, asym_file, ray_files);
        if (*signature) return cmd_signature(common, sig_xi, sig_extent, sig_n);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.kind() == ErrorKind::input ? 2 : 3;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
