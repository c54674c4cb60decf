#pragma once

#include <array>
#include <memory>
#include <vector>

#include "dnls/numerics.hpp"
#include "dnls/scattering.hpp"

namespace dnls {

// v(s) = -log(1 - |r(s)|^2) / (2 pi) built from a reflection table.
//
// Inside the tabulated ranges |r|^2 (and r) are cubic splines. Between the
// table and +/-1 a pole model is used: near a simple pole of s11 at p,
// u^2 / (1 - |r|^2) is smooth in u = |s - p|, so it is fitted by a quadratic
// through three table points and v keeps its -log|u|/pi singularity. Beyond
// the table, v decays like s^-4 at infinity and s^4 at the origin.
class DensityFunction {
public:
    explicit DensityFunction(const ReflectionTable& table);

    double operator()(double s) const;
    // |r|^2 and r from the splines; s must lie inside a tabulated range.
    double r_squared(double s) const;
    cplx r(double s) const;
    bool tabulated(double s) const;
    bool covers_negative() const;
    bool covers_positive() const;

    // Knots, +/-1, 0 and the ends of the tabulated ranges.
    const std::vector<double>& breakpoints() const { return breakpoints_; }

    // Outermost tabulated points (for tail estimates).
    std::vector<double> outer_edges() const;

private:
    struct Spline;
    struct Segment {
        double lo = 0.0, hi = 0.0;
        std::shared_ptr<const Spline> r2, re, im;
        std::vector<double> z;
        std::vector<double> r2_values;
    };
    struct GapModel {
        bool present = false;
        bool quadratic = false;
        double pole = 0.0;
        double edge = 0.0;  // distance from the pole to the first table point
        double v_edge = 0.0;
        std::array<double, 3> u{}, w{};
    };

    static int region_of(double s);
    double gap_value(const GapModel& g, double u) const;
    double spline_v(const Segment& seg, double s) const;
    void build_gap(int region, bool toward_pole_at_hi);

    std::array<Segment, 4> segments_{};  // (-inf,-1), (-1,0), (0,1), (1,inf)
    std::array<bool, 4> has_{};
    std::array<GapModel, 4> gaps_{};  // gap of each region on its +/-1 side
    std::vector<double> breakpoints_;
};

}  // namespace dnls
