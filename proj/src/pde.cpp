#include "dnls/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace dnls {

struct SpongeProfile {
    std::vector<double> sigma;       // damping rate per cell
    std::vector<double> background;  // tanh(x)
};

cplx InitialProfileSpec::operator()(double x) const {
    if (kind == Kind::pure_kink) return std::tanh(x);
    const double u = (x - center) / width;
    return std::tanh(x) + amplitude * std::exp(-u * u);
}

namespace {

std::shared_ptr<const SpongeProfile> make_sponge(const ComplexGrid1D& g, const PdeOptions& opt) {
    auto p = std::make_shared<SpongeProfile>();
    const std::size_t n = g.size();
    p->sigma.assign(n, 0.0);
    p->background.resize(n);
    const double L = g.x_last(), w = opt.sponge_width;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = g.x(i);
        p->background[i] = std::tanh(x);
        const double d = std::min(x + L, L - x);
        if (d < w) p->sigma[i] = opt.sponge_rate * 0.5 * (1.0 + std::cos(pi * d / w));
    }
    return p;
}

void validate(const PdeOptions& opt) {
    if (!(opt.sponge_width > 0.0)) throw input_error("sponge_width must be positive");
    if (!(opt.sponge_rate >= 0.0)) throw input_error("sponge_rate must be >= 0");
    if (!(opt.stability_factor > 0.0)) throw input_error("stability_factor must be positive");
}

// i (q_xx - 2(|q|^2 - 1) q) - sigma (q - tanh x); ghost cells -1 | +1, end cells frozen
void rhs(const std::vector<cplx>& q, std::vector<cplx>& out, double dx, const SpongeProfile& sp) {
    const std::size_t n = q.size();
    const double c = 1.0 / (12.0 * dx * dx);
    auto at = [&](std::ptrdiff_t j) -> cplx {
        if (j < 0) return -1.0;
        if (j >= static_cast<std::ptrdiff_t>(n)) return 1.0;
        return q[static_cast<std::size_t>(j)];
    };
    auto point = [&](std::size_t i, cplx m2, cplx m1, cplx p1, cplx p2) {
        const double qr = q[i].real(), qi = q[i].imag();
        const double lr = c * (-m2.real() + 16.0 * m1.real() - 30.0 * qr + 16.0 * p1.real() - p2.real());
        const double li = c * (-m2.imag() + 16.0 * m1.imag() - 30.0 * qi + 16.0 * p1.imag() - p2.imag());
        const double nl = 2.0 * (qr * qr + qi * qi - 1.0);
        const double ar = lr - nl * qr, ai = li - nl * qi;
        const double s = sp.sigma[i];
        out[i] = cplx(-ai - s * (qr - sp.background[i]), ar - s * qi);
    };
    for (std::size_t i = 1; i < std::min<std::size_t>(2, n - 1); ++i) point(i, at(-1), q[0], q[2], q[3]);
    const cplx* d = q.data();
    for (std::size_t i = 2; i + 2 < n; ++i) point(i, d[i - 2], d[i - 1], d[i + 1], d[i + 2]);
    if (n >= 4) {
        const std::size_t i = n - 2;
        point(i, q[i - 2], q[i - 1], q[i + 1], at(static_cast<std::ptrdiff_t>(n)));
    }
    out[0] = 0.0;
    out[n - 1] = 0.0;
}

// d/dt of the charge due to the damping term alone
double sponge_flux(const std::vector<cplx>& q, double dx, const SpongeProfile& sp) {
    double f = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (sp.sigma[i] == 0.0) continue;
        f -= 2.0 * sp.sigma[i] * (q[i].real() * (q[i].real() - sp.background[i]) + q[i].imag() * q[i].imag());
    }
    return f * dx;
}

struct Work {
    std::vector<cplx> k, acc, tmp;
};

void advance(EvolutionState& s, double h, Work& w) {
    std::vector<cplx>& q = s.grid.values();
    const std::size_t n = q.size();
    w.k.resize(n);
    w.acc.resize(n);
    w.tmp.resize(n);
    const double dx = s.grid.dx();
    const SpongeProfile& sp = *s.sponge;
    const double flux0 = sponge_flux(q, dx, sp);

    rhs(q, w.k, dx, sp);
    for (std::size_t i = 0; i < n; ++i) {
        w.acc[i] = w.k[i];
        w.tmp[i] = q[i] + (0.5 * h) * w.k[i];
    }
    rhs(w.tmp, w.k, dx, sp);
    for (std::size_t i = 0; i < n; ++i) {
        w.acc[i] += 2.0 * w.k[i];
        w.tmp[i] = q[i] + (0.5 * h) * w.k[i];
    }
    rhs(w.tmp, w.k, dx, sp);
    for (std::size_t i = 0; i < n; ++i) {
        w.acc[i] += 2.0 * w.k[i];
        w.tmp[i] = q[i] + h * w.k[i];
    }
    rhs(w.tmp, w.k, dx, sp);
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
        q[i] += (h / 6.0) * (w.acc[i] + w.k[i]);
        finite = finite && std::isfinite(q[i].real()) && std::isfinite(q[i].imag());
    }
    q.front() = -1.0;
    q.back() = 1.0;
    s.t += h;
    s.sponge_charge_change += 0.5 * h * (flux0 + sponge_flux(q, dx, sp));
    if (!finite) {
        std::ostringstream msg;
        msg << "numerical blow-up at t = " << s.t;
        throw numerical_error(msg.str());
    }
}

void check_cfl(const EvolutionState& s, double dt) {
    const double limit = s.options.stability_factor * s.grid.dx() * s.grid.dx();
    if (!(std::abs(dt) <= limit * (1.0 + 1e-12))) {
        std::ostringstream msg;
        msg << "CFL violation: |dt| = " << std::abs(dt) << " exceeds " << s.options.stability_factor
            << " dx^2 = " << limit;
        throw input_error(msg.str());
    }
}

}  // namespace

EvolutionState make_state(ComplexGrid1D grid, const PdeOptions& opt) {
    validate(opt);
    const double L = grid.x_last();
    if (grid.size() < 5 || std::abs(grid.x0() + L) > 1e-9 * std::max(1.0, L))
        throw input_error("evolution grid must be symmetric, [-L, L], with at least 5 points");
    std::vector<cplx>& v = grid.values();
    const double el = std::abs(v.front() + 1.0), er = std::abs(v.back() - 1.0);
    if (el > opt.boundary_tolerance || er > opt.boundary_tolerance) {
        std::ostringstream msg;
        msg << "background mismatch: |q(-L)+1| = " << el << ", |q(L)-1| = " << er;
        throw input_error(msg.str());
    }
    v.front() = -1.0;
    v.back() = 1.0;
    EvolutionState s{std::move(grid), 0.0, opt, 0.0, 0.0, nullptr};
    s.sponge = make_sponge(s.grid, opt);
    s.charge0 = renormalized_charge(s.grid);
    return s;
}

EvolutionState make_initial(const InitialProfileSpec& spec, double L, double dx, const PdeOptions& opt) {
    validate(opt);
    if (!(L > 0.0) || !(dx > 0.0)) throw input_error("L and dx must be positive");
    if (spec.kind == InitialProfileSpec::Kind::perturbed_kink) {
        if (!(spec.width > 0.0)) throw input_error("perturbation width must be positive");
        const double reach = std::abs(spec.center) + 4.0 * spec.width;
        if (spec.amplitude != 0.0 && reach > L - 3.0 * opt.sponge_width) {
            std::ostringstream msg;
            msg << "perturbation support |center| + 4 width = " << reach << " must stay inside L - 3 sponge_width = "
                << L - 3.0 * opt.sponge_width;
            throw input_error(msg.str());
        }
    }
    const double cells = L / dx;
    const long m = std::lround(cells);
    if (m < 2 || std::abs(cells - static_cast<double>(m)) > 1e-9 * cells) throw input_error("L/dx must be an integer");
    std::vector<cplx> v(static_cast<std::size_t>(2 * m + 1));
    for (long i = 0; i <= 2 * m; ++i) v[static_cast<std::size_t>(i)] = spec(-L + static_cast<double>(i) * dx);
    return make_state(ComplexGrid1D(-L, dx, std::move(v)), opt);
}

double default_dt(const EvolutionState& s) { return s.options.stability_factor * s.grid.dx() * s.grid.dx(); }

EvolutionState step(EvolutionState s, double dt) {
    check_cfl(s, dt);
    Work w;
    advance(s, dt, w);
    return s;
}

EvolutionState evolve_to(EvolutionState s, double t_target, double dt, const ProgressCallback& progress) {
    if (!(t_target >= s.t)) throw input_error("evolve_to: target time is before the current time");
    if (!(dt > 0.0)) throw input_error("evolve_to: dt must be positive");
    check_cfl(s, dt);
    const double span = t_target - s.t;
    if (span == 0.0) return s;
    const long n = std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-9)));
    const double h = span / static_cast<double>(n);
    const double t0 = s.t;
    Work w;
    double next_report = std::floor(t0) + 1.0;
    for (long i = 0; i < n; ++i) {
        advance(s, h, w);
        s.t = t0 + static_cast<double>(i + 1) * h;
        if (progress && s.t >= next_report - 1e-12) {
            progress(s.t);
            next_report = std::floor(s.t + 1e-12) + 1.0;
        }
    }
    s.t = t_target;
    return s;
}

std::vector<Snapshot> evolve_with_snapshots(EvolutionState s, const std::vector<double>& times, double dt,
                                            const ProgressCallback& progress) {
    std::vector<Snapshot> out;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0 && !(times[i] > times[i - 1])) throw input_error("snapshot times must be strictly increasing");
        s = evolve_to(std::move(s), times[i], dt, progress);
        out.push_back({s.t, s.grid});
    }
    return out;
}

std::vector<cplx> sample_along_ray(const std::vector<Snapshot>& history, double xi, const std::vector<double>& t_values,
                                   double sponge_width) {
    std::vector<cplx> out;
    out.reserve(t_values.size());
    for (double t : t_values) {
        auto it = std::find_if(history.begin(), history.end(),
                               [t](const Snapshot& s) { return std::abs(s.t - t) <= 1e-9 * std::max(1.0, t); });
        if (it == history.end()) {
            std::ostringstream msg;
            msg << "no snapshot at t = " << t;
            throw input_error(msg.str());
        }
        const double x = 2.0 * xi * t;
        const double trusted = it->grid.x_last() - 3.0 * sponge_width;
        if (std::abs(x) > trusted) {
            std::ostringstream msg;
            msg << "ray leaves domain: |x| = |2 xi t| = " << std::abs(x) << " at t = " << t << " exceeds L - 3 sponge_width = "
                << trusted;
            throw input_error(msg.str());
        }
        out.push_back(it->grid.interpolate(x));
    }
    return out;
}

double renormalized_charge(const ComplexGrid1D& grid) {
    const std::vector<cplx>& q = grid.values();
    const std::size_t n = q.size();
    if (n < 2) return 0.0;
    auto f = [&](std::size_t i) { return std::norm(q[i]) - 1.0; };
    const double h = grid.dx();
    const std::size_t intervals = n - 1;
    if (intervals == 1) return 0.5 * h * (f(0) + f(1));
    std::size_t simpson_end = intervals;
    double tail = 0.0;
    if (intervals % 2 == 1) {
        simpson_end = intervals - 3;
        const std::size_t j = simpson_end;
        tail = 3.0 * h / 8.0 * (f(j) + 3.0 * f(j + 1) + 3.0 * f(j + 2) + f(j + 3));
    }
    double s = 0.0;
    for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) s += f(i) + 4.0 * f(i + 1) + f(i + 2);
    return s * h / 3.0 + tail;
}

void write_snapshot_csv(std::ostream& out, const ComplexGrid1D& grid) {
    out << "x,re_q,im_q\n";
    char buf[128];
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid.x(i), grid[i].real(), grid[i].imag());
        out << buf;
    }
}

void write_ray_csv(std::ostream& out, double xi, const std::vector<double>& t_values, const std::vector<cplx>& q) {
    if (t_values.size() != q.size()) throw input_error("write_ray_csv: size mismatch");
    out << "t,x,re_q,im_q\n";
    char buf[160];
    for (std::size_t i = 0; i < q.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", t_values[i], 2.0 * xi * t_values[i], q[i].real(),
                      q[i].imag());
        out << buf;
    }
}

}  // namespace dnls
