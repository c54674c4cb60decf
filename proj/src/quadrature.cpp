#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "dnls/numerics.hpp"

namespace dnls {

namespace {

struct GlTableDeleter {
    void operator()(gsl_integration_glfixed_table* t) const { gsl_integration_glfixed_table_free(t); }
};
using GlTable = std::unique_ptr<gsl_integration_glfixed_table, GlTableDeleter>;

// Composite Gauss-Legendre over [a, b].
cplx gl_pass(const RealToComplex& g, double a, double b, int panels, const GlTable& table) {
    const double w = (b - a) / panels;
    cplx sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * w;
        const double hi = (p + 1 == panels) ? b : a + (p + 1) * w;
        for (std::size_t i = 0; i < table->n; ++i) {
            double xi = 0.0, wi = 0.0;
            gsl_integration_glfixed_point(lo, hi, i, &xi, &wi, table.get());
            sum += wi * g(xi);
        }
    }
    return sum;
}

// Tanh-sinh over each panel with 2n+1 nodes; endpoints are never sampled.
cplx ts_pass(const RealToComplex& g, double a, double b, int panels, int n) {
    constexpr double t_max = 3.2;
    const double h = t_max / n;
    const double w = (b - a) / panels;
    cplx sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * w;
        const double hi = (p + 1 == panels) ? b : a + (p + 1) * w;
        const double half = 0.5 * (hi - lo);
        for (int k = -n; k <= n; ++k) {
            const double t = k * h;
            const double u = 0.5 * pi * std::sinh(t);
            const double ch = std::cosh(u);
            const double weight = h * 0.5 * pi * std::cosh(t) / (ch * ch) * half;
            double s;
            if (k < 0)
                s = lo + half * 2.0 / (1.0 + std::exp(-2.0 * u));
            else
                s = hi - half * 2.0 / (1.0 + std::exp(2.0 * u));
            if (!(s > lo && s < hi) || weight == 0.0) continue;
            sum += weight * g(s);
        }
    }
    return sum;
}

cplx refine(const RealToComplex& g, double a, double b, const QuadratureSpec& spec) {
    GlTable table;
    if (spec.rule == QuadratureRule::gauss_legendre)
        table.reset(gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(spec.points_per_panel)));
    auto pass = [&](int level) {
        if (spec.rule == QuadratureRule::gauss_legendre)
            return gl_pass(g, a, b, spec.panels << level, table);
        return ts_pass(g, a, b, spec.panels, spec.points_per_panel << level);
    };
    cplx prev = pass(0);
    double change = 0.0;
    for (int level = 1; level <= spec.max_doublings; ++level) {
        const cplx cur = pass(level);
        change = std::abs(cur - prev);
        if (change <= std::max(spec.tolerance * std::abs(cur), spec.absolute_tolerance)) return cur;
        prev = cur;
    }
    std::ostringstream msg;
    msg << "quadrature did not converge on (" << a << ", " << b << "), last change " << change;
    throw numerical_error(msg.str());
}

cplx integrate_one(const RealToComplex& f, Interval iv, const QuadratureSpec& spec) {
    if (!iv.semi_infinite()) return refine(f, iv.a, iv.b, spec);
    const double a = iv.a;
    RealToComplex g = [&](double u) {
        const double om = 1.0 - u;
        if (om <= 0.0) return cplx(0.0);
        return f(a + u / om) / (om * om);
    };
    return refine(g, 0.0, 1.0, spec);
}

cplx integrate_mapped(const RealToComplex& f, Interval iv, const QuadratureSpec& spec,
                      const std::vector<double>& breakpoints) {
    std::vector<double> cuts{iv.a};
    for (double c : breakpoints)
        if (c > iv.a && c < iv.b) cuts.push_back(c);
    std::sort(cuts.begin() + 1, cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.push_back(iv.b);
    cplx sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) sum += integrate_one(f, {cuts[i], cuts[i + 1]}, spec);
    return sum;
}

}  // namespace

void QuadratureSpec::validate() const {
    if (panels < 1 || points_per_panel < 1) throw input_error("quadrature: panels and points must be positive");
    if (panels * points_per_panel < 8) throw input_error("quadrature: panels*points_per_panel must be >= 8");
    if (!(tolerance > 0.0) || absolute_tolerance < 0.0)
        throw input_error("quadrature: tolerances must be positive");
    if (max_doublings < 0) throw input_error("quadrature: max_doublings must be >= 0");
}

cplx integrate(const RealToComplex& f, Interval iv, const QuadratureSpec& spec,
               const std::vector<double>& breakpoints) {
    spec.validate();
    if (!(iv.b > iv.a)) throw input_error("quadrature: empty interval");
    return integrate_mapped(f, iv, spec, breakpoints);
}

cplx integrate_with_log_endpoint(const RealToComplex& f, Interval iv, cplx z,
                                 const QuadratureSpec& spec,
                                 const std::vector<double>& breakpoints) {
    spec.validate();
    if (!(iv.b > iv.a)) throw input_error("quadrature: empty interval");
    const bool on_axis = z.imag() == 0.0;
    const double x = z.real();
    const bool at_a = on_axis && x == iv.a;
    const bool at_b = on_axis && !iv.semi_infinite() && x == iv.b;

    if (!at_a && !at_b) {
        if (on_axis && x > iv.a && x < iv.b) throw input_error("interior pole unsupported");
        return integrate_mapped([&](double s) { return f(s) / (s - z); }, iv, spec, breakpoints);
    }
    if (!spec.singularity_subtraction)
        throw input_error("pole at interval endpoint requires singularity subtraction");

    // Finite part: the singular term f(z)*log(z - b) (right end) or
    // -f(z)*log(a - z) (left end) is dropped; the rest is real for real f.
    const cplx fz = f(x);
    auto subtracted = [&](double s) { return (f(s) - fz) / (s - x); };
    if (at_b) {
        const double len = iv.b - iv.a;
        return integrate_mapped(subtracted, iv, spec, breakpoints) - fz * std::log(len);
    }
    if (!iv.semi_infinite()) {
        const double len = iv.b - iv.a;
        return integrate_mapped(subtracted, iv, spec, breakpoints) + fz * std::log(len);
    }
    // (a, inf): split at a + 1 so that log(1) = 0 carries no constant.
    const cplx near = integrate_mapped(subtracted, {iv.a, iv.a + 1.0}, spec, breakpoints);
    const cplx far = integrate_mapped([&](double s) { return f(s) / (s - x); },
                                      Interval{iv.a + 1.0, iv.b}, spec, breakpoints);
    return near + far;
}

}  // namespace dnls
