#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "dnls/pipeline.hpp"
#include "doctest.h"

using namespace dnls;
namespace fs = std::filesystem;

namespace {

template <class F>
std::string error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("dnls_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

struct Run {
    int code;
    std::string err;
};

Run run_cli(const std::string& args, const fs::path& dir) {
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string(DNLS_CLI_PATH) + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " +
                            err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(err)};
}

std::vector<double> log_times(double a, double b, int n) {
    std::vector<double> t;
    for (int i = 0; i < n; ++i) t.push_back(a * std::pow(b / a, i / double(n - 1)));
    return t;
}

RunConfig small_config() {
    RunConfig c;
    c.profile.amplitude = 0.05;
    c.z_grid.n = 40;
    return c;
}

const ReflectionTable& generic_table() {
    static const ReflectionTable t = run_scatter(small_config()).table;
    return t;
}

}  // namespace

TEST_CASE("config: defaults, round trip, diagnostics") {
    const RunConfig d;
    CHECK(parse_config("{}") == d);
    CHECK(parse_config(serialize_config(d)) == d);

    const std::string text = R"({"profile": {"kind": "perturbed_kink", "amplitude": [0.1, -0.02], "center": 1.5, "width": 3},
        "L": 120, "dx": 0.1, "dt_factor": 0.15, "xi_values": [-1.5, 2.0], "t_values": [5, 10, 20],
        "z_grid": {"min": 0.05, "max": 4, "n": 33, "exclusion_radius": 0.002}, "snapshot_times": [0, 10],
        "fit_upper_fraction": 1.0, "output_dir": "somewhere", "threads": 1, "sponge_rate": 0.5})";
    const RunConfig c = parse_config(text);
    CHECK(c.profile.amplitude == cplx(0.1, -0.02));
    CHECK(c.z_grid.n == 33);
    CHECK(c.xi_values[0] == -1.5);
    CHECK(parse_config(serialize_config(c)) == c);
    CHECK(serialize_config(parse_config(serialize_config(c))) == serialize_config(c));

    CHECK(error_of([] { parse_config(R"({"dxx": 0.1})"); }).find("unknown key 'dxx'") != std::string::npos);
    CHECK(error_of([] { parse_config(R"({"profile": {"amp": 1}})"); }).find("profile.amp") != std::string::npos);
    CHECK(error_of([] { parse_config(R"({"xi_values": [1.5, 0.5]})"); }).find("xi_values[1]") != std::string::npos);
    CHECK(error_of([] { parse_config(R"({"xi_values": [1.0]})"); }).find("solitonic region") != std::string::npos);
    CHECK(error_of([] { parse_config(R"({"t_values": [1, 3, 2]})"); }).find("t_values[2]") != std::string::npos);
    CHECK(error_of([] { parse_config(R"({"L": 100})"); }).find("too small") != std::string::npos);
    CHECK(error_of([] { parse_config(R"({"dx": 0.07})"); }).find("'dx'") != std::string::npos);
    CHECK(error_of([] { parse_config(R"({"dt_factor": 0.3})"); }).find("stability") != std::string::npos);
    CHECK(error_of([] { parse_config(R"({"L": "big"})"); }).find("must be a number") != std::string::npos);
    CHECK(error_of([] { parse_config("{\n  \"L\": 200,\n  \"dx\" 0.1\n}"); }).find("line 3") != std::string::npos);
    CHECK(error_of([] { load_config("/nonexistent/run.json"); }).find("config not found") != std::string::npos);
}

TEST_CASE("scatter: tanh builtin and JSON round trip") {
    RunConfig c;
    c.profile.kind = "pure_kink";
    c.z_grid.n = 24;
    const auto s = run_scatter(c);
    CHECK(s.max_abs_r <= 1e-5);
    REQUIRE(s.spectrum.eigenvalues.size() == 1);
    CHECK(std::abs(s.spectrum.eigenvalues[0] - I) <= 1e-4);

    const fs::path dir = scratch("scatter");
    {
        std::ofstream f(dir / "s.json");
        write_scattering_json(f, s);
    }
    const auto back = read_scattering_json((dir / "s.json").string());
    REQUIRE(back.table.samples.size() == s.table.samples.size());
    for (std::size_t i = 0; i < s.table.samples.size(); ++i) {
        CHECK(back.table.samples[i].r == s.table.samples[i].r);
        CHECK(back.table.samples[i].s11 == s.table.samples[i].s11);
    }
    CHECK(back.spectrum.eigenvalues == s.spectrum.eigenvalues);
    CHECK(error_of([] { read_scattering_json("/nonexistent.json"); }).find("not found") != std::string::npos);
}

TEST_CASE("asym: zero reflection") {
    ReflectionTable t;
    ZGridSpec g;
    g.n = 24;
    t.z_grid = make_z_grid(g);
    for (double z : t.z_grid) t.samples.push_back({z, 1.0, 0.0, 0.0});
    RunConfig c;
    c.xi_values = {1.5, -2.0};
    c.t_values = {1.0, 10.0, 40.0};
    const auto run = run_asym(c, t);
    REQUIRE(run.rows.size() == 6);
    for (const auto& r : run.rows) {
        CHECK(r.correction == cplx(0.0));
        CHECK(r.q_asy == cplx(r.xi > 0 ? 1.0 : -1.0));
    }
    CHECK(!run.summary[0].h_ratio_mean);
    CHECK(!run.summary[0].q_decay_exponent);  // zero deviation: no fit
}

TEST_CASE("asym: generic data, decay and cross-check ratio") {
    RunConfig c = small_config();
    c.t_values = log_times(10.0, 1e4, 60);
    c.fit_upper_fraction = 1.0;
    c.L = 30030.0;
    validate_config(c);
    const auto run = run_asym(c, generic_table());
    const auto& s = run.summary.at(0);
    CHECK(s.identity_error <= 1e-10);
    REQUIRE(s.q_decay_exponent);
    MESSAGE("||q_asy| - 1| fitted exponent: " << *s.q_decay_exponent);
    CHECK(std::abs(*s.q_decay_exponent - 0.5) <= 0.1);
    REQUIRE(s.h_ratio_mean);
    CHECK(std::abs(*s.h_ratio_mean + 1.0 / std::sqrt(2.0 * pi)) <= 1e-4);
    CHECK(s.h_ratio_spread <= 1e-4);  // |r| and v come from different splines

    std::ostringstream out;
    write_asymptotic_csv(out, run.rows);
    const fs::path dir = scratch("asym");
    write_file(dir / "a.csv", out.str());
    const auto back = read_asymptotic_csv((dir / "a.csv").string());
    REQUIRE(back.size() == run.rows.size());
    CHECK(back[7].q_asy == run.rows[7].q_asy);
    CHECK(back[7].h == run.rows[7].h);
    CHECK_THROWS_AS(run_asym([] {
        RunConfig bad = small_config();
        bad.xi_values = {0.5};
        return bad;
    }(), generic_table()), Error);
}

TEST_CASE("evolve: oracles and sanity bounds") {
    RunConfig k;
    k.profile.kind = "pure_kink";
    k.L = 60.0;
    k.dx = 0.05;
    k.xi_values = {1.5, 3.0};
    k.t_values = {1.0, 2.0, 5.0};
    const auto run = run_evolve(k);
    for (const auto& r : run.rays)
        for (std::size_t i = 0; i < r.t.size(); ++i)
            CHECK(std::abs(r.q[i] - std::tanh(2.0 * r.xi * r.t[i])) <= 1e-6);
    for (std::size_t i = 1; i < 3; ++i) CHECK(std::abs(run.rays[1].q[i] - 1.0) <= 1e-6);  // x = 12, 30

    RunConfig p;
    p.L = 150.0;
    p.dx = 0.1;
    p.xi_values = {1.5};
    p.t_values = {10.0, 20.0, 40.0};
    p.snapshot_times = {0.0, 20.0};
    const auto pr = run_evolve(p);
    for (cplx q : pr.rays[0].q) {
        CHECK(std::isfinite(q.real()));
        CHECK(std::abs(q) > 0.5);
        CHECK(std::abs(q) < 1.5);
    }
    REQUIRE(pr.snapshots.size() == 2);
    CHECK(pr.snapshots[1].t == 20.0);

    std::ostringstream out;
    write_ray_csv(out, 1.5, pr.rays[0].t, pr.rays[0].q);
    const fs::path dir = scratch("evolve");
    write_file(dir / ray_file_name(1.5), out.str());
    const auto back = read_ray_csv((dir / ray_file_name(1.5)).string());
    CHECK(back.xi == doctest::Approx(1.5));
    CHECK(back.q == pr.rays[0].q);
}

TEST_CASE("compare: exact match, key mismatch") {
    RunConfig c = small_config();
    c.t_values = {10.0, 20.0, 40.0, 80.0};
    c.L = 300.0;
    const auto asym = run_asym(c, generic_table()).rows;
    RayTrace ray{1.5, {}, {}};
    for (const auto& r : asym) {
        ray.t.push_back(r.t);
        ray.q.push_back(r.q_asy);
    }
    const auto rep = compare_rays(asym, {ray}, 0.5);
    REQUIRE(rep.rays.size() == 1);
    const auto& rc = rep.rays[0];
    CHECK(rc.exact_match);
    CHECK(!rc.p_corrected);
    CHECK(rc.max_err_corrected == 0.0);
    for (const auto& row : rc.rows) CHECK(row.err_leading >= 0.0);
    std::ostringstream js;
    write_comparison_json(js, rep);
    CHECK(js.str().find("exact match") != std::string::npos);

    RayTrace shifted = ray;
    shifted.t[2] = 41.0;
    const std::string msg = error_of([&] { compare_rays(asym, {shifted}, 0.5); });
    CHECK(msg.find("key mismatch") != std::string::npos);
    CHECK(msg.find("t 41") != std::string::npos);
    CHECK(msg.find("t 40") != std::string::npos);
}

TEST_CASE("compare: synthetic injection") {
    // leading phase, a t^-1/2 oscillating correction, and a t^-3/4 residual on top
    const auto ts = log_times(10.0, 1000.0, 40);
    std::vector<AsymptoticRow> asym;
    RayTrace ray{1.5, ts, {}};
    const cplx lead = std::exp(-I * 0.3);
    for (double t : ts) {
        const cplx corr = 0.2 / std::sqrt(t) * std::exp(I * 2.3 * t);
        const cplx qa = lead * (1.0 + corr);
        asym.push_back({t, 3.0 * t, 1.5, qa, corr, lead, 0.0});
        ray.q.push_back(qa + 0.05 * std::pow(t, -0.75) * std::exp(I * 0.4));
    }
    const auto rep = compare_rays(asym, {ray}, 1.0);
    const auto& rc = rep.rays[0];
    REQUIRE(rc.p_corrected);
    REQUIRE(rc.p_leading);
    CHECK(std::abs(*rc.p_corrected - 0.75) <= 0.02);
    CHECK(std::abs(*rc.p_leading - 0.5) <= 0.05);
    CHECK(rc.pass);
    CHECK(rep.all_pass);
    // default window: upper half of the times
    CHECK(compare_rays(asym, {ray}, 0.5).rays[0].window_start == 20);
}

TEST_CASE("determinism") {
    RunConfig c = small_config();
    c.t_values = {10.0, 20.0};
    c.L = 90.0;
    c.dx = 0.1;
    auto csv = [&] {
        std::ostringstream a, b;
        write_asymptotic_csv(a, run_asym(c, run_scatter(c).table).rows);
        const auto r = run_evolve(c);
        write_ray_csv(b, 1.5, r.rays[0].t, r.rays[0].q);
        return a.str() + b.str();
    };
    CHECK(csv() == csv());
}

TEST_CASE("executable: exit codes") {
    const fs::path dir = scratch("exe");
    CHECK(run_cli("--version", dir).code == 0);
    CHECK(read_file(dir / "stdout.txt").find("dnls") != std::string::npos);
    CHECK(run_cli("", dir).code == 2);
    CHECK(run_cli("scatter --bogus", dir).code == 2);

    write_file(dir / "missing.json", R"({"profile": {"kind": "file", "path": "/nonexistent/q.csv"}})");
    auto r = run_cli("scatter --config " + (dir / "missing.json").string() + " --output " + (dir / "o").string(), dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("profile not found") != std::string::npos);

    write_file(dir / "bad.csv", "x,re_q,im_q\n-1,-1,0\n0,0,0\n0.7,0.5,0\n1,1,0\n");
    write_file(dir / "bad.json", R"({"profile": {"kind": "file", "path": ")" + (dir / "bad.csv").string() + R"("}})");
    r = run_cli("scatter --config " + (dir / "bad.json").string() + " --output " + (dir / "o").string(), dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("data row 2") != std::string::npos);  // x = 0 is off the mean spacing

    write_file(dir / "xi.json", R"({"xi_values": [0.5]})");
    r = run_cli("asym --config " + (dir / "xi.json").string(), dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("solitonic region") != std::string::npos);

    // a huge value in the initial data overflows the nonlinearity
    std::ostringstream big;
    big << "x,re_q,im_q\n";
    for (int i = 0; i <= 400; ++i) {
        const double x = -20.0 + 0.1 * i;
        big << x << "," << (i == 200 ? 1e200 : std::tanh(x)) << ",0\n";
    }
    write_file(dir / "big.csv", big.str());
    write_file(dir / "big.json", R"({"profile": {"kind": "file", "path": ")" + (dir / "big.csv").string() +
                                     R"("}, "L": 60, "dx": 0.1, "t_values": [1]})");
    r = run_cli("evolve --config " + (dir / "big.json").string() + " --output " + (dir / "o").string(), dir);
    CHECK(r.code == 3);
    CHECK(r.err.find("blow-up") != std::string::npos);
}
