#include <gsl/gsl_roots.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "dnls/density.hpp"
#include "dnls/scattering.hpp"
#include "gsl_util.hpp"

namespace dnls {

namespace {

struct ArcFunction {
    const PotentialField& q;
    const ScatteringOptions& opt;
    // s11 is purely imaginary on |z| = 1, so its zeros are sign changes of Im s11.
    double operator()(double w) const { return s11_at(q, std::polar(1.0, w), opt).imag(); }
};

double arc_thunk(double w, void* p) { return (*static_cast<const ArcFunction*>(p))(w); }

struct SolverDeleter {
    void operator()(gsl_root_fsolver* s) const { gsl_root_fsolver_free(s); }
};

double refine_root(const ArcFunction& f, double lo, double hi) {
    detail::quiet_gsl();
    std::unique_ptr<gsl_root_fsolver, SolverDeleter> solver(gsl_root_fsolver_alloc(gsl_root_fsolver_brent));
    gsl_function fn{&arc_thunk, const_cast<ArcFunction*>(&f)};
    if (gsl_root_fsolver_set(solver.get(), &fn, lo, hi) != GSL_SUCCESS)
        throw numerical_error("eigenvalue bracket rejected by root solver");
    double root = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        if (gsl_root_fsolver_iterate(solver.get()) != GSL_SUCCESS) break;
        root = gsl_root_fsolver_root(solver.get());
        const double a = gsl_root_fsolver_x_lower(solver.get());
        const double b = gsl_root_fsolver_x_upper(solver.get());
        if (gsl_root_test_interval(a, b, 1e-14, 0.0) == GSL_SUCCESS) break;
        if (f(root) == 0.0) break;
    }
    return root;
}

}  // namespace

DiscreteSpectrum find_discrete_spectrum(const PotentialField& q, int n_arc_samples,
                                        const ScatteringOptions& opt) {
    if (n_arc_samples < 16) throw input_error("n_arc_samples must be >= 16");
    opt.validate();
    const double delta = 2.0 * std::asin(0.5 * opt.exclusion_radius) * (1.0 + 1e-6);
    const ArcFunction f{q, opt};
    std::vector<double> w(static_cast<std::size_t>(n_arc_samples)), g(w.size());
    for (int i = 0; i < n_arc_samples; ++i) {
        w[i] = delta + (pi - 2.0 * delta) * i / (n_arc_samples - 1);
        g[i] = f(w[i]);
    }
    DiscreteSpectrum out;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        double root;
        if (g[i] == 0.0)
            root = w[i];
        else if (g[i] * g[i + 1] < 0.0)
            root = refine_root(f, w[i], w[i + 1]);
        else
            continue;
        const cplx z = std::polar(1.0, root);
        if (root < 2.0 * delta || root > pi - 2.0 * delta) {
            std::ostringstream msg;
            msg << "eigenvalue too close to branch point: bracket [" << w[i] << ", " << w[i + 1] << "]";
            out.warnings.push_back(msg.str());
            continue;
        }
        const double residual = std::abs(s11_at(q, z, opt));
        if (residual > 1e-8) {
            std::ostringstream msg;
            msg << "eigenvalue at arg " << root << " has |s11| = " << residual;
            out.warnings.push_back(msg.str());
        }
        out.eigenvalues.push_back(z);
    }
    for (cplx z : out.eigenvalues) out.norming_constants.push_back(norming_constant(q, z, opt));
    return out;
}

cplx norming_constant(const PotentialField& q, cplx zj, const ScatteringOptions& opt) {
    // psi_1^- = b psi_2^+ at a zero of s11, and s21(z_j) = b.
    const Mat2 pm = jost_matrix(q, zj, Side::minus, opt);
    const Mat2 pp = jost_matrix(q, zj, Side::plus, opt);
    const cplx num = std::conj(pp.m12) * pm.m11 + std::conj(pp.m22) * pm.m21;
    const double den = std::norm(pp.m12) + std::norm(pp.m22);
    const cplx b = num / den;

    const double h = 1e-4;
    const cplx tau = I * zj / std::abs(zj);
    auto s = [&](double k) { return s11_at(q, zj + k * h * tau, opt); };
    const cplx ds = (-s(2) + 8.0 * s(1) - 8.0 * s(-1) + s(-2)) / (12.0 * h * tau);
    if (std::abs(ds) < 1e-10) throw numerical_error("non-simple zero: |s11'| below 1e-10");
    return b / ds;
}

TraceEvaluation trace_formula_eval(const DiscreteSpectrum& spectrum, const ReflectionTable& table, cplx z) {
    if (z.imag() < 0.05) throw input_error("evaluation too near the cut (Im z < 0.05)");
    const DensityFunction v(table);
    if (!v.covers_negative() || !v.covers_positive())
        throw input_error("trace formula needs reflection data on both half-lines");
    cplx blaschke = 1.0;
    for (cplx zj : spectrum.eigenvalues) blaschke *= (z - zj) / (z - std::conj(zj));

    const auto edges = v.outer_edges();
    const double lo = *std::min_element(edges.begin(), edges.end());
    const double hi = *std::max_element(edges.begin(), edges.end());
    QuadratureSpec spec;
    spec.rule = QuadratureRule::tanh_sinh;
    spec.panels = 1;
    spec.points_per_panel = 8;
    spec.tolerance = 1e-11;
    spec.absolute_tolerance = 1e-16;
    const cplx integral = integrate_with_log_endpoint([&](double s) { return cplx(v(s)); }, {lo, hi}, z, spec,
                                                      v.breakpoints());
    double tail = 0.0;
    for (double e : edges) tail += v(e) * std::abs(e) / 3.0 / std::abs(e - z);
    return {blaschke * std::exp(-I * integral), tail};
}

}  // namespace dnls
