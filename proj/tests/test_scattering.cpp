#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "dnls/density.hpp"
#include "dnls/scattering.hpp"
#include "doctest.h"

using namespace dnls;

namespace {

cplx kink(double x) { return std::tanh(x); }

PotentialField tanh_field(double dx = 0.01) { return sample_potential(kink, 25.0, dx); }

PotentialField perturbed(double a, double dx = 0.01, double L = 25.0) {
    return sample_potential([a](double x) { return std::tanh(x) + a * std::exp(-x * x / 4.0); }, L, dx);
}

// pi phase winding across the origin on top of a density hump: no dip, no bound state
PotentialField hump_kink() {
    return sample_potential(
        [](double x) {
            return -std::exp(-I * pi * 0.5 * (1.0 + std::tanh(x / 0.5))) * (1.0 + 2.0 * std::exp(-x * x));
        },
        30.0, 0.01);
}

const PotentialField& generic() {
    static const PotentialField q = perturbed(0.1);
    return q;
}

const ReflectionTable& generic_table() {
    static const ReflectionTable t = [] {
        ZGridSpec g;
        g.n = 40;
        return reflection_table(generic(), make_z_grid(g));
    }();
    return t;
}

cplx wronskian(const Mat2& minus, const Mat2& plus) { return minus.m11 * plus.m22 - minus.m21 * plus.m12; }

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("dnls_test_" + name)).string();
}

template <class F>
std::string error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("jost: free right background gives Y+ exactly") {
    auto q = sample_potential([](double x) { return cplx(x < -3.0 ? -1.0 : 1.0); }, 20.0, 0.01, 1e-12);
    for (double z : {2.0, -0.4, 7.0}) {
        const Mat2 m = jost_matrix(q, z, Side::plus);
        const Mat2 y{1.0, 1.0 / z, 1.0 / z, 1.0};
        CHECK(max_abs_diff(m, y) < 1e-13);
    }
    // off the axis only the second column continues analytically
    const cplx z(0.3, 0.8);
    const Mat2 m = jost_matrix(q, z, Side::plus);
    CHECK(std::abs(m.m12 - 1.0 / z) < 1e-12);
    CHECK(std::abs(m.m22 - 1.0) < 1e-12);
}

TEST_CASE("jost: determinant identity and resolution stability") {
    const auto q = tanh_field();
    const Mat2 m = jost_matrix(q, 2.0, Side::minus);
    CHECK(std::abs(m.det() - 0.75) < 1e-8);
    ScatteringOptions fine;
    fine.max_step = 0.005;
    const Mat2 m2 = jost_matrix(q, 2.0, Side::minus, fine);
    CHECK(max_abs_diff(m, m2) < 1e-8);
}

TEST_CASE("jost: fourth-order convergence in the step") {
    // fine potential grid so every RK4 node is a grid node
    const auto q = perturbed(0.1, 0.0025);
    auto run = [&](double h) {
        ScatteringOptions o;
        o.max_step = h;
        return jost_matrix(q, 0.5, Side::plus, o);
    };
    const Mat2 a = run(0.04), b = run(0.02), c = run(0.01);
    const double ratio = max_abs_diff(a, b) / max_abs_diff(b, c);
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("jost: exclusion disks") {
    const auto q = tanh_field();
    for (cplx z : {cplx(0.0005), cplx(1.0009), cplx(-1.0, 0.0005)}) {
        const std::string msg = error_of([&] { jost_matrix(q, z, Side::plus); });
        CHECK(msg.find("singular spectral point") != std::string::npos);
    }
    ScatteringOptions wide;
    wide.exclusion_radius = 0.1;
    CHECK_THROWS_AS(jost_matrix(q, 1.05, Side::plus, wide), Error);
}

TEST_CASE("potential: background and profile validation") {
    CHECK(error_of([] { sample_potential(kink, 5.0, 0.01); }).find("background mismatch") != std::string::npos);
    CHECK_NOTHROW(sample_potential(kink, 5.0, 0.01, 1e-4));
    CHECK_THROWS_AS(sample_potential(kink, 25.0, 0.03), Error);

    const std::string good = temp_path("good.csv");
    {
        std::ofstream out(good);
        out << "x,re_q,im_q\n";
        for (int i = 0; i <= 5000; ++i) {
            const double x = -25.0 + 0.01 * i;
            char buf[96];
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x, std::tanh(x), 0.0);
            out << buf;
        }
    }
    const auto loaded = load_profile_csv(good);
    CHECK(loaded.half_width() == doctest::Approx(25.0));
    const auto ref = tanh_field();
    CHECK(std::abs(scattering_coefficients(loaded, 0.7).s11 - scattering_coefficients(ref, 0.7).s11) < 1e-12);

    const std::string bad = temp_path("bad.csv");
    {
        std::ofstream out(bad);
        out << "x,re_q,im_q\n-2,-1,0\n-1,-0.5,0\n0.5,0,0\n1,0.5,0\n2,1,0\n";
    }
    const std::string msg = error_of([&] { load_profile_csv(bad); });
    CHECK(msg.find("non-uniform spacing") != std::string::npos);
    CHECK(msg.find("row 3") != std::string::npos);

    const std::string junk = temp_path("junk.csv");
    {
        std::ofstream out(junk);
        out << "x,re_q,im_q\n-1,-1,0\nfoo,bar\n";
    }
    CHECK(error_of([&] { load_profile_csv(junk); }).find("malformed profile row at line 3") != std::string::npos);
    CHECK(error_of([] { load_profile_csv("/nonexistent/profile.csv"); }).find("profile not found") !=
          std::string::npos);
    std::filesystem::remove(good);
    std::filesystem::remove(bad);
    std::filesystem::remove(junk);
}

TEST_CASE("scattering: black soliton is reflectionless at two resolutions") {
    for (double dx : {0.02, 0.01}) {
        const auto s = scattering_coefficients(tanh_field(dx), 0.5);
        CHECK(std::abs(s.s21) <= 1e-5);
        CHECK(std::abs(std::abs(s.s11) - 1.0) <= 1e-5);
    }
    ZGridSpec g;
    g.n = 30;
    const auto t = reflection_table(tanh_field(), make_z_grid(g));
    double worst = 0.0;
    for (const auto& s : t.samples) worst = std::max(worst, std::abs(s.r));
    CHECK(worst <= 1e-5);
}

TEST_CASE("scattering: unitarity, |r| < 1 and r = s21/s11") {
    const auto& t = generic_table();
    CHECK(max_unitarity_violation(t) <= 1e-6);
    for (const auto& s : t.samples) {
        CHECK(std::abs(s.r) < 1.0);
        CHECK(s.r == s.s21 / s.s11);
    }
}

TEST_CASE("scattering: symmetry r(z) = conj r(1/z)") {
    const auto& q = generic();
    const auto a = scattering_coefficients(q, 2.0), b = scattering_coefficients(q, 0.5);
    CHECK(std::abs(a.r - std::conj(b.r)) <= 1e-6);
    CHECK(std::abs(a.r) > 1e-3);  // nontrivial data
    CHECK(max_symmetry_violation(generic_table()) <= 1e-6);
}

TEST_CASE("scattering: Wronskian is independent of x") {
    const auto& q = generic();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> mag(0.05, 5.0), sign(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        double z = 0.0;
        do z = std::copysign(mag(rng), sign(rng));
        while (std::abs(std::abs(z) - 1.0) < 0.01);
        const double h = q.half_width() / 2;
        const cplx w0 = wronskian(jost_matrix_at(q, z, Side::minus, 0.0), jost_matrix_at(q, z, Side::plus, 0.0));
        const cplx w1 = wronskian(jost_matrix_at(q, z, Side::minus, h), jost_matrix_at(q, z, Side::plus, h));
        CHECK(std::abs(w0 - w1) <= 1e-8);
    }
}

TEST_CASE("scattering: decay at infinity and at the origin") {
    // Gaussian data: r decays faster than any power, so only the z^-2 bound is visible
    const auto& q = generic();
    const double c = std::abs(scattering_coefficients(q, 5.0).r) * 25.0;
    for (double z : {10.0, 20.0, 40.0, 80.0}) {
        CHECK(std::abs(scattering_coefficients(q, z).r) <= c / (z * z));
        CHECK(std::abs(scattering_coefficients(q, 1.0 / z).r) <= c / (z * z));
    }
    // a kink in q' makes the z^-2 law sharp
    const auto rough = sample_potential([](double x) { return std::tanh(x) + 0.1 * std::exp(-std::abs(x)); }, 40.0, 0.01);
    std::vector<std::pair<double, double>> big, small;
    for (double z : {10.0, 20.0, 40.0, 80.0}) big.emplace_back(z, std::abs(scattering_coefficients(rough, z).r));
    for (double z : {0.1, 0.05, 0.025, 0.0125})
        small.emplace_back(1.0 / z, std::abs(scattering_coefficients(rough, z).r));
    CHECK(fit_power_law(big).exponent >= 1.8);
    CHECK(fit_power_law(small).exponent >= 1.8);
}

TEST_CASE("scattering: r tends to -/+1 at +/-1 for strong perturbation") {
    // with a = 0.5 the near-edge spectrum sits far enough from +/-1 for the limit to show at 5e-3
    const auto q = perturbed(0.5);
    for (double z : {1.005, 0.995, -1.005, -0.995}) {
        const cplx target = z > 0 ? -1.0 : 1.0;
        CHECK(std::abs(scattering_coefficients(q, z).r - target) <= 0.05);
    }
}

TEST_CASE("scattering: halving dx changes r by <= 1e-6") {
    const auto coarse = perturbed(0.1, 0.02), fine = perturbed(0.1, 0.01);
    double worst = 0.0;
    for (double z : {-3.0, -1.2, -0.7, -0.2, 0.15, 0.6, 0.98, 1.02, 1.7, 4.0})
        worst = std::max(worst, std::abs(scattering_coefficients(coarse, z).r - scattering_coefficients(fine, z).r));
    CHECK(worst <= 1e-6);
}

TEST_CASE("z grid: closed under inversion, outside the disks, sorted") {
    ZGridSpec g;
    g.n = 25;
    const auto grid = make_z_grid(g);
    CHECK(std::is_sorted(grid.begin(), grid.end()));
    for (double z : grid) {
        CHECK(std::abs(z) >= g.z_min * (1 - 1e-12));
        CHECK(std::abs(z) <= g.z_max * (1 + 1e-12));
        CHECK_NOTHROW(check_admissible(z, g.exclusion_radius));
        if (std::abs(z) >= 1.0 / g.z_max * (1 + 1e-12)) {
            const double inv = 1.0 / z;
            CHECK(std::any_of(grid.begin(), grid.end(), [&](double y) { return std::abs(y - inv) < 1e-12 * std::abs(inv); }));
        }
    }
    CHECK(grid.front() == doctest::Approx(-g.z_max));
    CHECK(grid.back() == doctest::Approx(g.z_max));
    g.z_min = 0.0005;
    CHECK_THROWS_AS(make_z_grid(g), Error);
}

TEST_CASE("spectrum: black soliton has one eigenvalue at i") {
    const auto q = tanh_field();
    for (int n : {32, 96}) {
        const auto sp = find_discrete_spectrum(q, n);
        REQUIRE(sp.eigenvalues.size() == 1);
        CHECK(std::abs(sp.eigenvalues[0] - I) <= 1e-4);
        CHECK(std::abs(s11_at(q, sp.eigenvalues[0])) < 1e-10);
        const cplx ratio = sp.norming_constants[0] / (I * sp.eigenvalues[0]);
        CHECK(ratio.real() > 0.0);
        CHECK(std::abs(ratio.imag()) < 1e-6 * ratio.real());
    }
}

TEST_CASE("spectrum: small perturbation keeps the eigenvalue near i") {
    const auto sp = find_discrete_spectrum(perturbed(1e-3), 48);
    REQUIRE(sp.eigenvalues.size() == 1);
    CHECK(std::abs(sp.eigenvalues[0] - I) <= 1e-2);
}

TEST_CASE("spectrum: kink without a density dip has no eigenvalues") {
    const auto q = hump_kink();
    for (int n : {48, 192}) {
        const auto sp = find_discrete_spectrum(q, n);
        CHECK(sp.eigenvalues.empty());
        CHECK(sp.warnings.empty());
    }
}

TEST_CASE("spectrum: eigenvalue invariants and norming-constant phase") {
    const auto sp = find_discrete_spectrum(generic(), 64);
    REQUIRE(!sp.eigenvalues.empty());
    REQUIRE(sp.norming_constants.size() == sp.eigenvalues.size());
    for (std::size_t j = 0; j < sp.eigenvalues.size(); ++j) {
        const cplx z = sp.eigenvalues[j];
        CHECK(std::abs(std::abs(z) - 1.0) < 1e-12);
        CHECK(z.imag() > 0.0);
        if (j > 0) CHECK(std::arg(z) > std::arg(sp.eigenvalues[j - 1]) + 1e-6);
        const double d = std::arg(sp.norming_constants[j] / (I * z));
        CHECK(std::abs(d) <= 1e-3);
    }
}

TEST_CASE("spectrum: norming constant is Lipschitz in the data") {
    const auto a = find_discrete_spectrum(perturbed(0.1), 32);
    const auto b = find_discrete_spectrum(
        sample_potential([](double x) { return std::tanh(x) + (0.1 + 1e-4) * std::exp(-x * x / 4.0); }, 25.0, 0.01),
        32);
    REQUIRE(a.eigenvalues.size() == b.eigenvalues.size());
    for (std::size_t j = 0; j < a.eigenvalues.size(); ++j) {
        if (std::abs(a.eigenvalues[j] - I) > 0.1) continue;  // the soliton near i
        const double dc = std::abs(a.norming_constants[j] - b.norming_constants[j]);
        CHECK(dc > 0.0);
        CHECK(dc <= 5e-3);
    }
}

TEST_CASE("spectrum: argument checks") {
    CHECK_THROWS_AS(find_discrete_spectrum(tanh_field(), 8), Error);
}

TEST_CASE("trace formula: closed-form Blaschke cases") {
    ReflectionTable zero;
    for (double z : {-4.0, -2.0, -0.5, -0.25, 0.25, 0.5, 2.0, 4.0}) {
        zero.z_grid.push_back(z);
        zero.samples.push_back({z, 1.0, 0.0, 0.0});
    }
    DiscreteSpectrum one;
    one.eigenvalues = {I};
    CHECK(std::abs(trace_formula_eval(one, zero, 2.0 * I).s11 - 1.0 / 3.0) < 1e-14);
    DiscreteSpectrum none;
    CHECK(std::abs(trace_formula_eval(none, zero, cplx(0.3, 0.4)).s11 - 1.0) < 1e-14);
    CHECK(error_of([&] { trace_formula_eval(none, zero, cplx(0.3, 0.01)); }).find("too near the cut") !=
          std::string::npos);
}

TEST_CASE("trace formula: matches the Wronskian continuation") {
    ZGridSpec g;
    g.n = 120;
    const auto table = reflection_table(generic(), make_z_grid(g));
    const auto sp = find_discrete_spectrum(generic(), 64);
    for (cplx z : {cplx(0, 1.5), cplx(0.5, 0.5)}) {
        const cplx direct = s11_at(generic(), z);
        const auto tr = trace_formula_eval(sp, table, z);
        CHECK(std::abs(tr.s11 - direct) <= 1e-3 * std::abs(direct));
        CHECK(tr.tail_estimate < 1e-3);
    }
}
