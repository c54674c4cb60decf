#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "dnls/error.hpp"

namespace dnls {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// 2x2 complex matrix, row-major entries.
struct Mat2 {
    cplx m11{}, m12{}, m21{}, m22{};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    cplx det() const { return m11 * m22 - m12 * m21; }
    Mat2 inverse() const;
    bool finite() const;
};

Mat2 operator+(const Mat2& a, const Mat2& b);
Mat2 operator-(const Mat2& a, const Mat2& b);
Mat2 operator*(const Mat2& a, const Mat2& b);
Mat2 operator*(cplx s, const Mat2& a);
double max_abs_diff(const Mat2& a, const Mat2& b);

// Uniform grid; node positions are always x0 + i*dx.
class ComplexGrid1D {
public:
    ComplexGrid1D(double x0, double dx, std::vector<cplx> values);

    double x0() const { return x0_; }
    double dx() const { return dx_; }
    std::size_t size() const { return values_.size(); }
    double x(std::size_t i) const { return x0_ + static_cast<double>(i) * dx_; }
    double x_last() const { return x(values_.size() - 1); }

    const std::vector<cplx>& values() const { return values_; }
    std::vector<cplx>& values() { return values_; }
    cplx operator[](std::size_t i) const { return values_[i]; }

    // Four-point Lagrange interpolation (one-sided stencil at the ends).
    cplx interpolate(double x) const;

private:
    double x0_;
    double dx_;
    std::vector<cplx> values_;
};

// Classical RK4 for Y' = A(x) Y with n_steps equal steps; x_end < x_start integrates backward.
template <class Coefficient>
Mat2 integrate_linear_ode(Coefficient&& coefficient, Mat2 y, double x_start, double x_end,
                          int n_steps) {
    if (n_steps < 1) throw input_error("integrate_linear_ode: n_steps must be >= 1");
    const double h = (x_end - x_start) / n_steps;
    for (int i = 0; i < n_steps; ++i) {
        const double x = x_start + i * h;
        const Mat2 a0 = coefficient(x);
        const Mat2 ah = coefficient(x + 0.5 * h);
        const Mat2 a1 = coefficient(x_start + (i + 1) * h);
        const Mat2 k1 = a0 * y;
        const Mat2 k2 = ah * (y + cplx(0.5 * h) * k1);
        const Mat2 k3 = ah * (y + cplx(0.5 * h) * k2);
        const Mat2 k4 = a1 * (y + cplx(h) * k3);
        y = y + cplx(h / 6.0) * (k1 + cplx(2.0) * k2 + cplx(2.0) * k3 + k4);
        if (!y.finite())
            throw numerical_error("numerical blow-up at RK4 step " + std::to_string(i));
    }
    return y;
}

enum class QuadratureRule { gauss_legendre, tanh_sinh };

struct QuadratureSpec {
    QuadratureRule rule = QuadratureRule::gauss_legendre;
    int panels = 16;
    int points_per_panel = 8;
    bool singularity_subtraction = true;
    // Panel count (or tanh-sinh level) is doubled until two successive
    // estimates agree to this relative tolerance.
    double tolerance = 1e-12;
    double absolute_tolerance = 1e-15;
    int max_doublings = 12;

    void validate() const;
};

// (a, b) with b possibly +infinity.
struct Interval {
    double a;
    double b;
    bool semi_infinite() const { return std::isinf(b); }
};

using RealToComplex = std::function<cplx(double)>;

// Integral of f over an interval. Semi-infinite pieces use s = a + u/(1-u).
// Breakpoints inside the interval split it into separately refined pieces
// (kinks of tabulated data, integrable log singularities).
cplx integrate(const RealToComplex& f, Interval iv, const QuadratureSpec& spec,
               const std::vector<double>& breakpoints = {});

// Cauchy-type integral of f(s)/(s - z). For z equal to an endpoint the
// logarithmic singular part is removed (finite-part value; see README).
cplx integrate_with_log_endpoint(const RealToComplex& f, Interval iv, cplx z,
                                 const QuadratureSpec& spec,
                                 const std::vector<double>& breakpoints = {});

cplx log_gamma(cplx w);

struct PowerLawFit {
    double amplitude;
    double exponent;  // e ~ amplitude * t^(-exponent)
};

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& samples);

}  // namespace dnls
