#pragma once

#include <array>
#include <functional>
#include <ostream>
#include <vector>

#include "dnls/density.hpp"
#include "dnls/numerics.hpp"
#include "dnls/phase.hpp"

namespace dnls {

// (0, xi1) U (xi2, inf) for xi > 1; (0, inf) U (xi2, xi1) for xi < -1.
std::vector<Interval> interval_I(double xi);

DensityFunction density_v(const ReflectionTable& table);

// Density as seen by the integrals: any v(s) >= 0 plus the points where it is
// not smooth (table knots, +/-1, 0, jumps).
struct DensityModel {
    std::function<double(double)> v;
    std::vector<double> breakpoints;

    static DensityModel from(const DensityFunction& d);
};

// Quadrature used for every integral of v over I.
QuadratureSpec density_quadrature();

cplx T_infinity(const DensityModel& v, const std::vector<Interval>& intervals);
// Integral of v(s)/s over I (no exponential).
double alpha_infinity(const DensityModel& v, const std::vector<Interval>& intervals);

// Finite limit of T(z) at the stationary point xi_k, an endpoint of I:
// T(inf) exp(-i FP int_I v/(s - xi_k)), the logarithm of the endpoint
// singularity being absorbed by the local power (z - xi_k)^{-/+ i v}.
cplx T_k_regularized(int k, const DensityModel& v, const std::vector<Interval>& intervals, double xi_k);

inline double epsilon_of(int k) { return k == 1 ? 1.0 : -1.0; }

// -r(xi_k) T_k^2 exp(2 i t theta(xi_k) + i eps_k v log(2 t |theta''(xi_k)|)).
cplx scaled_reflection(int k, cplx r_at_xi_k, double v_at_xi_k, cplx T_k, const RayCoordinate& ray,
                       const StationaryPair& geometry);

struct PcMoment {
    Mat2 moment;  // [[0, -i eps beta12], [i eps beta21, 0]]
    cplx beta12;
    cplx beta21;
};

PcMoment pc_first_moment(int k, cplx r_xi, double v_xi);

// (2,1) entry of sum_k M_out(xi_k) M_k M_out(xi_k)^-1 / sqrt(2 t theta''(xi_k) eps_k).
cplx e1_correction(const RayCoordinate& ray, const StationaryPair& geometry, const std::array<Mat2, 2>& moments);

// Scattering data of -q(-x): s11(z) -> conj s11(-z), s21(z) -> -s21(-z).
ReflectionTable mirror_table(const ReflectionTable& table);

// Densities of the data and of its mirror image. Rays with xi < -1 are
// evaluated as -q_mirror(-x, t) on the ray -xi > 1.
struct AsymptoticModel {
    DensityFunction direct;
    DensityFunction mirrored;

    explicit AsymptoticModel(const ReflectionTable& table);
};

// t-independent data of one ray. For xi < -1 everything except xi and
// background refers to the mirrored data on the ray -xi.
struct RayData {
    double xi;
    double background;  // +1 for xi > 1, -1 for xi < -1
    StationaryPair geometry;
    std::vector<Interval> intervals;
    cplx T_infinity;
    double alpha_infinity;
    cplx T1, T2;  // T_k at xi_k
    double v1, v2;
    cplx r1, r2;  // r(xi_k)
};

// xi > 1 only.
RayData prepare_ray(const DensityFunction& v, double xi);
RayData prepare_ray(const AsymptoticModel& model, double xi);

struct AsymptoticConstants {
    double background;
    std::vector<Interval> interval_I;
    cplx T_infinity;
    double alpha_infinity;
    cplx T1_at_xi1;
    cplx T2_at_xi2;
    double Phi1;
    cplx Phi2;
    double alpha_phase;
    std::array<cplx, 2> r_scaled;
};

AsymptoticConstants constants_at(const RayData& ray, double t);

struct CorrectionTerm {
    cplx e1_21;
    std::array<Mat2, 2> pc_moments;
    std::array<cplx, 2> beta12;
    std::array<cplx, 2> beta21;
    std::array<cplx, 2> terms;  // per stationary point
};

CorrectionTerm correction_at(const RayData& ray, const AsymptoticConstants& c, double t);

// background * T(inf)^-2 (1 + e1_21).
cplx q_asymptotic(const AsymptoticConstants& c, const CorrectionTerm& corr);
inline cplx q_leading(const AsymptoticConstants& c) { return c.background * std::exp(-I * c.alpha_infinity); }

struct HClosedForm {
    cplx h;
    cplx term1;  // xi_1 bracket term with its prefactor
    cplx term2;
};

// Closed-form h(x,t) with the printed phases; cross-check only.
HClosedForm h_closed_form(const RayData& ray, const AsymptoticConstants& c, double t);

struct AsymptoticRow {
    double t, x, xi;
    cplx q_asy, correction, q_lead, h;
};

AsymptoticRow evaluate_row(const RayData& ray, double t);

// CSV "t,x,xi,re_q_asy,im_q_asy,abs_q_asy,re_corr,im_corr,re_q_lead,im_q_lead,re_h,im_h".
void write_asymptotic_csv(std::ostream& out, const std::vector<AsymptoticRow>& rows);

}  // namespace dnls
