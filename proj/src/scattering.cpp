#include "dnls/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

namespace dnls {

PotentialField::PotentialField(ComplexGrid1D grid, double background_tolerance)
    : grid_(std::move(grid)), half_width_(0.0), background_tolerance_(background_tolerance) {
    const double a = grid_.x0(), b = grid_.x_last();
    if (!(b > 0.0) || std::abs(a + b) > 1e-9 * std::max(1.0, b))
        throw input_error("profile grid must be symmetric, [-L, L]");
    half_width_ = b;
    const cplx left = grid_.values().front(), right = grid_.values().back();
    if (std::abs(left + 1.0) > background_tolerance_ || std::abs(right - 1.0) > background_tolerance_) {
        std::ostringstream msg;
        msg << "background mismatch: |q(-L)+1| = " << std::abs(left + 1.0)
            << ", |q(L)-1| = " << std::abs(right - 1.0) << " (tolerance " << background_tolerance_ << ")";
        throw input_error(msg.str());
    }
}

PotentialField sample_potential(const std::function<cplx(double)>& q0, double L, double dx,
                                double background_tolerance) {
    if (!(L > 0.0) || !(dx > 0.0)) throw input_error("L and dx must be positive");
    const double cells = 2.0 * L / dx;
    const long n = std::lround(cells);
    if (std::abs(cells - static_cast<double>(n)) > 1e-8 * cells) throw input_error("2L/dx must be an integer");
    std::vector<cplx> v(static_cast<std::size_t>(n) + 1);
    for (long i = 0; i <= n; ++i) v[static_cast<std::size_t>(i)] = q0(-L + static_cast<double>(i) * dx);
    return PotentialField(ComplexGrid1D(-L, dx, std::move(v)), background_tolerance);
}

PotentialField load_profile_csv(const std::string& path, double background_tolerance) {
    std::ifstream in(path);
    if (!in) throw input_error("profile not found: " + path);
    std::string line;
    if (!std::getline(in, line)) throw input_error("profile is empty: " + path);
    std::vector<double> xs;
    std::vector<cplx> qs;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double x, re, im;
        if (!(row >> x >> re >> im))
            throw input_error("malformed profile row at line " + std::to_string(lineno));
        xs.push_back(x);
        qs.emplace_back(re, im);
    }
    if (xs.size() < 4) throw input_error("profile needs at least 4 rows");
    const double dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    if (!(dx > 0.0)) throw input_error("profile x values must increase");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double expect = xs.front() + static_cast<double>(i) * dx;
        if (std::abs(xs[i] - expect) > 1e-6 * dx)
            throw input_error("non-uniform spacing in profile at data row " + std::to_string(i + 1) +
                              " (line " + std::to_string(i + 2) + ")");
    }
    return PotentialField(ComplexGrid1D(xs.front(), dx, std::move(qs)), background_tolerance);
}

void ScatteringOptions::validate() const {
    if (!(exclusion_radius > 0.0)) throw input_error("exclusion radius must be positive");
    if (!(max_step > 0.0) || !(phase_resolution > 0.0)) throw input_error("step controls must be positive");
}

void check_admissible(cplx z, double exclusion_radius) {
    if (std::abs(z) <= exclusion_radius || std::abs(z - 1.0) <= exclusion_radius ||
        std::abs(z + 1.0) <= exclusion_radius) {
        std::ostringstream msg;
        msg << "singular spectral point: z = " << z << " lies in an exclusion disk";
        throw input_error(msg.str());
    }
}

namespace {

// Conjugated Jost variable u = e^{i zeta x s3} Y^{-1} psi; its coefficient is
// O(|q -/+ 1|) and carries the oscillation only in e^{+-2 i zeta x}.
struct JostFrame {
    const PotentialField& q;
    double sg;
    cplx u, det, zeta;

    JostFrame(const PotentialField& field, cplx z, Side side)
        : q(field), sg(side == Side::plus ? 1.0 : -1.0), u(sg / z), det(1.0 - 1.0 / (z * z)),
          zeta(zeta_of(z)) {}

    Mat2 operator()(double x) const {
        const cplx dq = q(x) - sg;
        const cplx a12 = I * std::conj(dq), a21 = -I * dq;
        const cplx m11 = a12 * u, m12 = a12, m21 = a21, m22 = a21 * u;
        const cplx e = std::exp(2.0 * I * zeta * x);
        return {(m11 - u * m21) / det, (m12 - u * m22) / det * e, (m21 - u * m11) / det / e,
                (m22 - u * m12) / det};
    }

    Mat2 psi(const Mat2& U, double x) const {
        const Mat2 Y{1.0, u, u, 1.0};
        const cplx e = std::exp(-I * zeta * x);
        const Mat2 Einv{e, 0.0, 0.0, 1.0 / e};
        return Y * Einv * U;
    }
};

int step_count(double length, cplx zeta, const ScatteringOptions& opt) {
    double h = opt.max_step;
    const double az = std::abs(zeta);
    if (az > 0.0) h = std::min(h, opt.phase_resolution / az);
    return std::max(1, static_cast<int>(std::ceil(length / h)));
}

}  // namespace

Mat2 jost_matrix_at(const PotentialField& q, cplx z, Side side, double x, const ScatteringOptions& opt) {
    opt.validate();
    check_admissible(z, opt.exclusion_radius);
    const double L = q.half_width();
    if (x < -L || x > L) throw input_error("evaluation point outside [-L, L]");
    JostFrame frame(q, z, side);
    const double start = frame.sg * L;
    const Mat2 U = integrate_linear_ode(frame, Mat2::identity(), start, x,
                                        step_count(std::abs(x - start), frame.zeta, opt));
    return frame.psi(U, x);
}

Mat2 jost_matrix(const PotentialField& q, cplx z, Side side, const ScatteringOptions& opt) {
    return jost_matrix_at(q, z, side, 0.0, opt);
}

ScatteringSample scattering_coefficients(const PotentialField& q, double z, const ScatteringOptions& opt) {
    const Mat2 pp = jost_matrix(q, z, Side::plus, opt);
    const Mat2 pm = jost_matrix(q, z, Side::minus, opt);
    const cplx d = 1.0 - 1.0 / (z * z);
    const cplx s11 = (pm.m11 * pp.m22 - pm.m21 * pp.m12) / d;
    const cplx s21 = (pp.m11 * pm.m21 - pp.m21 * pm.m11) / d;
    if (std::abs(s11) < 1e-12) {
        std::ostringstream msg;
        msg << "spectral singularity on R at z = " << z;
        throw numerical_error(msg.str());
    }
    return {z, s11, s21, s21 / s11};
}

cplx s11_at(const PotentialField& q, cplx z, const ScatteringOptions& opt) {
    const Mat2 pp = jost_matrix(q, z, Side::plus, opt);
    const Mat2 pm = jost_matrix(q, z, Side::minus, opt);
    return (pm.m11 * pp.m22 - pm.m21 * pp.m12) / (1.0 - 1.0 / (z * z));
}

void ZGridSpec::validate() const {
    if (!(exclusion_radius > 0.0) || exclusion_radius >= 0.5) throw input_error("z grid: bad exclusion radius");
    if (!(z_min > exclusion_radius)) throw input_error("z grid: z_min must exceed the exclusion radius");
    if (!(z_max > 1.0 / (1.0 - exclusion_radius))) throw input_error("z grid: z_max too small");
    if (!(z_min < 1.0 - exclusion_radius)) throw input_error("z grid: z_min too large");
    if (n < 2) throw input_error("z grid: n must be >= 2");
}

std::vector<double> make_z_grid(const ZGridSpec& spec) {
    spec.validate();
    const double u_lo = -std::log1p(-spec.exclusion_radius) * (1.0 + 1e-9);
    const double u_hi = std::log(spec.z_max);
    std::vector<double> pos;
    std::vector<double> us(static_cast<std::size_t>(spec.n));
    for (int k = 0; k < spec.n; ++k) us[k] = u_lo * std::pow(u_hi / u_lo, static_cast<double>(k) / (spec.n - 1));
    for (double u : us) {
        pos.push_back(std::exp(u));
        pos.push_back(std::exp(-u));
    }
    const double inner = std::exp(-u_hi);
    if (spec.z_min < inner * (1.0 - 1e-12)) {
        const double du = us[spec.n - 1] - us[spec.n - 2];
        const double span = std::log(inner) - std::log(spec.z_min);
        const int m = std::max(1, static_cast<int>(std::ceil(span / du)));
        for (int k = 1; k <= m; ++k) pos.push_back(inner * std::exp(-span * k / m));
    }
    std::vector<double> grid;
    for (double z : pos) {
        if (z < spec.z_min * (1.0 - 1e-12)) continue;
        grid.push_back(z);
        if (spec.negative) grid.push_back(-z);
    }
    std::sort(grid.begin(), grid.end());
    return grid;
}

ReflectionTable reflection_table(const PotentialField& q, const std::vector<double>& z_grid,
                                 const ScatteringOptions& opt) {
    opt.validate();
    for (double z : z_grid) check_admissible(z, opt.exclusion_radius);
    ReflectionTable t;
    t.z_grid = z_grid;
    t.exclusion_radius = opt.exclusion_radius;
    t.samples.resize(z_grid.size());
    unsigned nthreads = opt.threads > 0 ? static_cast<unsigned>(opt.threads) : std::thread::hardware_concurrency();
    nthreads = std::max(1u, std::min<unsigned>(nthreads, static_cast<unsigned>(z_grid.size())));
    std::vector<std::exception_ptr> errors(nthreads);
    auto work = [&](unsigned id) {
        try {
            for (std::size_t i = id; i < z_grid.size(); i += nthreads)
                t.samples[i] = scattering_coefficients(q, z_grid[i], opt);
        } catch (...) {
            errors[id] = std::current_exception();
        }
    };
    if (nthreads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned id = 0; id < nthreads; ++id) pool.emplace_back(work, id);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return t;
}

double max_symmetry_violation(const ReflectionTable& table) {
    std::vector<std::pair<double, cplx>> s;
    for (const auto& smp : table.samples) s.emplace_back(smp.z, smp.r);
    std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    double worst = 0.0;
    for (const auto& [z, r] : s) {
        const double target = 1.0 / z;
        auto it = std::lower_bound(s.begin(), s.end(), target,
                                   [](const auto& a, double v) { return a.first < v; });
        for (auto jt : {it, it == s.begin() ? it : it - 1}) {
            if (jt == s.end()) continue;
            if (std::abs(jt->first - target) <= 1e-12 * std::abs(target))
                worst = std::max(worst, std::abs(r - std::conj(jt->second)));
        }
    }
    return worst;
}

double max_unitarity_violation(const ReflectionTable& table) {
    double worst = 0.0;
    for (const auto& s : table.samples)
        worst = std::max(worst, std::abs(std::norm(s.s11) - std::norm(s.s21) - 1.0));
    return worst;
}

}  // namespace dnls
