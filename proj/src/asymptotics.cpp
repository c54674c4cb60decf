#include "dnls/asymptotics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace dnls {

std::vector<Interval> interval_I(double xi) {
    const StationaryPair p = stationary_points(xi);
    const double inf = std::numeric_limits<double>::infinity();
    if (xi > 0) return {{0.0, p.xi1}, {p.xi2, inf}};
    return {{0.0, inf}, {p.xi2, p.xi1}};
}

DensityFunction density_v(const ReflectionTable& table) { return DensityFunction(table); }

DensityModel DensityModel::from(const DensityFunction& d) {
    return {[d](double s) { return d(s); }, d.breakpoints()};
}

QuadratureSpec density_quadrature() {
    QuadratureSpec spec;
    spec.rule = QuadratureRule::tanh_sinh;
    spec.panels = 1;
    spec.points_per_panel = 8;
    spec.tolerance = 1e-12;
    spec.absolute_tolerance = 1e-14;
    return spec;
}

namespace {

template <class F>
cplx guarded(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::numerical)
            throw numerical_error(std::string("tail integration failure: ") + e.what());
        throw;
    }
}

double integral_v_over_s(const DensityModel& v, const std::vector<Interval>& intervals) {
    double sum = 0.0;
    for (const Interval& iv : intervals)
        sum += guarded([&] {
                   return integrate([&](double s) { return cplx(v.v(s) / s); }, iv, density_quadrature(),
                                    v.breakpoints);
               }).real();
    return sum;
}

double arg_gamma_iv(double v) {
    // Gamma(i v) ~ -i / v as v -> 0+
    if (v == 0.0) return -0.5 * pi;
    return log_gamma(cplx(0.0, v)).imag();
}

// One summand of E_1: M_out(xi) M M_out(xi)^-1 / sqrt(2 t theta'' eps), entry (2,1).
cplx conjugated_term(double xi_k, double theta_pp, double eps, double t, const Mat2& moment) {
    if (std::abs(xi_k * xi_k - 1.0) < 1e-14) throw numerical_error("conjugation singular at |xi_k| = 1");
    const double scale = 2.0 * t * theta_pp * eps;
    if (!(scale > 0.0)) throw numerical_error("geometry error: theta''(xi_k) eps_k must be positive");
    const Mat2 out{1.0, 1.0 / xi_k, 1.0 / xi_k, 1.0};
    return (out * moment * out.inverse()).m21 / std::sqrt(scale);
}

}  // namespace

cplx T_infinity(const DensityModel& v, const std::vector<Interval>& intervals) {
    double sum = 0.0;
    for (const Interval& iv : intervals)
        sum += guarded([&] {
                   return integrate([&](double s) { return cplx(v.v(s) / (2.0 * s)); }, iv, density_quadrature(),
                                    v.breakpoints);
               }).real();
    return std::exp(I * sum);
}

double alpha_infinity(const DensityModel& v, const std::vector<Interval>& intervals) {
    return integral_v_over_s(v, intervals);
}

cplx T_k_regularized(int k, const DensityModel& v, const std::vector<Interval>& intervals, double xi_k) {
    if (k != 1 && k != 2) throw input_error("stationary point index must be 1 or 2");
    bool endpoint = false;
    for (const Interval& iv : intervals) endpoint = endpoint || iv.a == xi_k || iv.b == xi_k;
    if (!endpoint) throw input_error("xi_k is not an endpoint of I");
    cplx fp = 0.0;
    for (const Interval& iv : intervals)
        fp += guarded([&] {
            return integrate_with_log_endpoint([&](double s) { return cplx(v.v(s)); }, iv, xi_k,
                                               density_quadrature(), v.breakpoints);
        });
    return T_infinity(v, intervals) * std::exp(-I * fp.real());
}

cplx scaled_reflection(int k, cplx r_at_xi_k, double v_at_xi_k, cplx T_k, const RayCoordinate& ray,
                       const StationaryPair& geometry) {
    if (!(ray.t > 0.0)) throw input_error("scaled reflection needs t > 0");
    const double eps = epsilon_of(k);
    const double xk = k == 1 ? geometry.xi1 : geometry.xi2;
    const double tpp = k == 1 ? geometry.theta_pp_1 : geometry.theta_pp_2;
    if (!(tpp * eps > 0.0)) throw numerical_error("geometry error: theta''(xi_k) has the wrong sign");
    const double th = theta(xk, ray.xi).real();
    const double phase = 2.0 * ray.t * th + eps * v_at_xi_k * std::log(2.0 * ray.t * std::abs(tpp));
    return -r_at_xi_k * T_k * T_k * std::exp(I * phase);
}

PcMoment pc_first_moment(int k, cplx r_xi, double v_xi) {
    if (k != 1 && k != 2) throw input_error("stationary point index must be 1 or 2");
    if (v_xi < 0.0) throw input_error("negative density");
    if (v_xi == 0.0) return {Mat2{}, 0.0, 0.0};
    if (r_xi == 0.0) throw input_error("inconsistent data: v(xi_k) > 0 but r_xi = 0");
    const double eps = epsilon_of(k);
    const cplx num = std::sqrt(2.0 * pi) * std::exp(I * ((2 * k - 1) * pi / 4.0)) * std::exp(-0.5 * pi * v_xi);
    const cplx b12 = num / (-r_xi * std::exp(log_gamma(cplx(0.0, -eps * v_xi))));
    const cplx b21 = v_xi / b12;
    return {Mat2{0.0, -I * eps * b12, I * eps * b21, 0.0}, b12, b21};
}

cplx e1_correction(const RayCoordinate& ray, const StationaryPair& geometry, const std::array<Mat2, 2>& moments) {
    if (!(ray.t > 0.0)) throw input_error("correction needs t > 0");
    return conjugated_term(geometry.xi1, geometry.theta_pp_1, 1.0, ray.t, moments[0]) +
           conjugated_term(geometry.xi2, geometry.theta_pp_2, -1.0, ray.t, moments[1]);
}

ReflectionTable mirror_table(const ReflectionTable& table) {
    ReflectionTable m;
    m.exclusion_radius = table.exclusion_radius;
    for (auto it = table.samples.rbegin(); it != table.samples.rend(); ++it) {
        const cplx s11 = std::conj(it->s11), s21 = -it->s21;
        m.z_grid.push_back(-it->z);
        m.samples.push_back({-it->z, s11, s21, s21 / s11});
    }
    return m;
}

AsymptoticModel::AsymptoticModel(const ReflectionTable& table)
    : direct(table), mirrored(mirror_table(table)) {}

RayData prepare_ray(const DensityFunction& v, double xi) {
    if (!(xi > 0.0)) throw input_error("prepare_ray on a bare density needs xi > 1");
    RayData d;
    d.xi = xi;
    d.background = 1.0;
    d.geometry = stationary_points(xi);
    d.intervals = interval_I(xi);
    const DensityModel m = DensityModel::from(v);
    d.T_infinity = T_infinity(m, d.intervals);
    d.alpha_infinity = alpha_infinity(m, d.intervals);
    d.T1 = T_k_regularized(1, m, d.intervals, d.geometry.xi1);
    d.T2 = T_k_regularized(2, m, d.intervals, d.geometry.xi2);
    d.v1 = v(d.geometry.xi1);
    d.v2 = v(d.geometry.xi2);
    d.r1 = v.r(d.geometry.xi1);
    d.r2 = v.r(d.geometry.xi2);
    return d;
}

RayData prepare_ray(const AsymptoticModel& model, double xi) {
    stationary_points(xi);  // region check
    if (xi > 0.0) return prepare_ray(model.direct, xi);
    RayData d = prepare_ray(model.mirrored, -xi);
    d.xi = xi;
    d.background = -1.0;
    return d;
}

namespace {

double eval_xi(const RayData& ray) { return ray.background * ray.xi; }

}  // namespace

AsymptoticConstants constants_at(const RayData& ray, double t) {
    const double xi = eval_xi(ray);
    const RayCoordinate rc = RayCoordinate::from_xi(xi, t);
    const StationaryPair& g = ray.geometry;
    AsymptoticConstants c;
    c.background = ray.background;
    c.interval_I = ray.intervals;
    c.T_infinity = ray.T_infinity;
    c.alpha_infinity = ray.alpha_infinity;
    c.T1_at_xi1 = ray.T1;
    c.T2_at_xi2 = ray.T2;
    c.r_scaled[0] = scaled_reflection(1, ray.r1, ray.v1, ray.T1, rc, g);
    c.r_scaled[1] = scaled_reflection(2, ray.r2, ray.v2, ray.T2, rc, g);

    const double ag = arg_gamma_iv(ray.v1);
    c.Phi1 = pi / 4.0 + ag - std::arg(c.r_scaled[0]);
    const double tpp_inv = theta_derivatives(1.0 / g.xi1, xi).d2.real();
    c.alpha_phase = pi / 2.0 + 4.0 * t * theta(g.xi1, xi).real() +
                    ray.v1 * std::log(4.0 * t * t * std::abs(g.theta_pp_1 * tpp_inv)) + 2.0 * ag +
                    2.0 * std::arg(ray.T1 / ray.T2);
    c.Phi2 = c.Phi1 + c.alpha_phase - I * ray.v1;
    return c;
}

CorrectionTerm correction_at(const RayData& ray, const AsymptoticConstants& c, double t) {
    const StationaryPair& g = ray.geometry;
    CorrectionTerm out;
    const std::array<double, 2> vs{ray.v1, ray.v2};
    for (int k = 1; k <= 2; ++k) {
        const PcMoment m = pc_first_moment(k, c.r_scaled[k - 1], vs[k - 1]);
        out.pc_moments[k - 1] = m.moment;
        out.beta12[k - 1] = m.beta12;
        out.beta21[k - 1] = m.beta21;
    }
    out.terms[0] = conjugated_term(g.xi1, g.theta_pp_1, 1.0, t, out.pc_moments[0]);
    out.terms[1] = conjugated_term(g.xi2, g.theta_pp_2, -1.0, t, out.pc_moments[1]);
    out.e1_21 = e1_correction(RayCoordinate::from_xi(eval_xi(ray), t), g, out.pc_moments);
    return out;
}

cplx q_asymptotic(const AsymptoticConstants& c, const CorrectionTerm& corr) {
    const cplx tm2 = 1.0 / (c.T_infinity * c.T_infinity);
    return c.background * tm2 * (1.0 + corr.e1_21);
}

HClosedForm h_closed_form(const RayData& ray, const AsymptoticConstants& c, double t) {
    if (!(t > 0.0)) throw input_error("h needs t > 0");
    if (ray.v1 == 0.0) return {0.0, 0.0, 0.0};
    const double x1 = ray.geometry.xi1, x1s = x1 * x1;
    const double tpp1 = std::abs(ray.geometry.theta_pp_1);
    const double tpp_inv = std::abs(theta_derivatives(1.0 / x1, eval_xi(ray)).d2.real());
    const cplx pref = std::sqrt(ray.v1) / (2.0 * std::sqrt(t * pi) * (1.0 - x1s) * I);
    const cplx e1 = std::exp(I * c.Phi1), e2 = std::exp(I * c.Phi2);
    HClosedForm h;
    h.term1 = pref * (x1s / e1 + e1) / std::sqrt(tpp1);
    h.term2 = pref * (1.0 / e2 + x1s * e2) / std::sqrt(tpp_inv);
    h.h = h.term1 + h.term2;
    return h;
}

AsymptoticRow evaluate_row(const RayData& ray, double t) {
    const AsymptoticConstants c = constants_at(ray, t);
    const CorrectionTerm corr = correction_at(ray, c, t);
    AsymptoticRow row;
    row.t = t;
    row.x = 2.0 * ray.xi * t;
    row.xi = ray.xi;
    row.q_asy = q_asymptotic(c, corr);
    row.correction = corr.e1_21;
    row.q_lead = q_leading(c);
    row.h = h_closed_form(ray, c, t).h;
    return row;
}

void write_asymptotic_csv(std::ostream& out, const std::vector<AsymptoticRow>& rows) {
    out << "t,x,xi,re_q_asy,im_q_asy,abs_q_asy,re_corr,im_corr,re_q_lead,im_q_lead,re_h,im_h\n";
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      r.t, r.x, r.xi, r.q_asy.real(), r.q_asy.imag(), std::abs(r.q_asy), r.correction.real(),
                      r.correction.imag(), r.q_lead.real(), r.q_lead.imag(), r.h.real(), r.h.imag());
        out << buf;
    }
}

}  // namespace dnls
