#include <algorithm>
#include <cmath>

#include "dnls/numerics.hpp"

namespace dnls {

Mat2 Mat2::inverse() const {
    const cplx d = det();
    if (d == cplx(0.0)) throw numerical_error("singular 2x2 matrix");
    return {m22 / d, -m12 / d, -m21 / d, m11 / d};
}

bool Mat2::finite() const {
    auto ok = [](cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); };
    return ok(m11) && ok(m12) && ok(m21) && ok(m22);
}

Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.m11 + b.m11, a.m12 + b.m12, a.m21 + b.m21, a.m22 + b.m22};
}

Mat2 operator-(const Mat2& a, const Mat2& b) {
    return {a.m11 - b.m11, a.m12 - b.m12, a.m21 - b.m21, a.m22 - b.m22};
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
            a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}

Mat2 operator*(cplx s, const Mat2& a) { return {s * a.m11, s * a.m12, s * a.m21, s * a.m22}; }

double max_abs_diff(const Mat2& a, const Mat2& b) {
    return std::max({std::abs(a.m11 - b.m11), std::abs(a.m12 - b.m12), std::abs(a.m21 - b.m21),
                     std::abs(a.m22 - b.m22)});
}

ComplexGrid1D::ComplexGrid1D(double x0, double dx, std::vector<cplx> values)
    : x0_(x0), dx_(dx), values_(std::move(values)) {
    if (!(dx_ > 0.0)) throw input_error("grid spacing must be positive");
    if (values_.empty()) throw input_error("grid has no samples");
}

cplx ComplexGrid1D::interpolate(double x) const {
    const std::size_t n = values_.size();
    const double tol = 1e-9 * dx_;
    if (x < x0_ - tol || x > x_last() + tol) throw input_error("interpolation point outside grid");
    if (n < 4) {
        // too short for a cubic; fall back to linear
        if (n == 1) return values_[0];
        const double u = std::clamp((x - x0_) / dx_, 0.0, static_cast<double>(n - 1));
        const std::size_t i = std::min(static_cast<std::size_t>(u), n - 2);
        const double f = u - static_cast<double>(i);
        return (1.0 - f) * values_[i] + f * values_[i + 1];
    }
    const double u = (x - x0_) / dx_;
    long i = static_cast<long>(std::floor(u)) - 1;
    i = std::clamp(i, 0L, static_cast<long>(n) - 4);
    const double s = u - static_cast<double>(i);  // stencil nodes at s = 0,1,2,3
    const double l0 = -(s - 1) * (s - 2) * (s - 3) / 6.0;
    const double l1 = s * (s - 2) * (s - 3) / 2.0;
    const double l2 = -s * (s - 1) * (s - 3) / 2.0;
    const double l3 = s * (s - 1) * (s - 2) / 6.0;
    const auto k = static_cast<std::size_t>(i);
    return l0 * values_[k] + l1 * values_[k + 1] + l2 * values_[k + 2] + l3 * values_[k + 3];
}

}  // namespace dnls
