#include "dnls/density.hpp"

#include <gsl/gsl_spline.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsl_util.hpp"

namespace dnls {

struct DensityFunction::Spline {
    gsl_spline* sp = nullptr;
    double lo, hi;

    Spline(const std::vector<double>& x, const std::vector<double>& y) : lo(x.front()), hi(x.back()) {
        detail::quiet_gsl();
        const gsl_interp_type* type = x.size() >= 3 ? gsl_interp_cspline : gsl_interp_linear;
        sp = gsl_spline_alloc(type, x.size());
        if (gsl_spline_init(sp, x.data(), y.data(), x.size()) != GSL_SUCCESS) {
            gsl_spline_free(sp);
            throw numerical_error("spline construction failed (grid not increasing?)");
        }
    }
    ~Spline() { gsl_spline_free(sp); }
    Spline(const Spline&) = delete;
    Spline& operator=(const Spline&) = delete;

    // A null accelerator keeps evaluation thread-safe.
    double operator()(double x) const { return gsl_spline_eval(sp, std::clamp(x, lo, hi), nullptr); }
};

namespace {

double v_from_r2(double r2) {
    if (r2 <= 0.0) return 0.0;
    return -std::log1p(-r2) / (2.0 * pi);
}

}  // namespace

int DensityFunction::region_of(double s) {
    if (s < -1.0) return 0;
    if (s < 0.0) return 1;
    if (s < 1.0) return 2;
    return 3;
}

DensityFunction::DensityFunction(const ReflectionTable& table) {
    std::array<std::vector<std::size_t>, 4> idx;
    for (std::size_t i = 0; i < table.samples.size(); ++i) {
        const auto& smp = table.samples[i];
        const double m = std::abs(smp.r);
        if (!(m < 1.0)) throw numerical_error("reflection modulus violation at z = " + std::to_string(smp.z));
        if (smp.z == 0.0 || std::abs(smp.z) == 1.0) continue;
        idx[region_of(smp.z)].push_back(i);
    }
    for (int k = 0; k < 4; ++k) {
        auto& ids = idx[k];
        std::sort(ids.begin(), ids.end(),
                  [&](std::size_t a, std::size_t b) { return table.samples[a].z < table.samples[b].z; });
        if (ids.size() < 2) continue;
        Segment seg;
        std::vector<double> re, im;
        for (std::size_t i : ids) {
            const auto& smp = table.samples[i];
            if (!seg.z.empty() && smp.z <= seg.z.back()) continue;  // drop duplicates
            seg.z.push_back(smp.z);
            seg.r2_values.push_back(std::norm(smp.r));
            re.push_back(smp.r.real());
            im.push_back(smp.r.imag());
        }
        if (seg.z.size() < 2) continue;
        seg.lo = seg.z.front();
        seg.hi = seg.z.back();
        seg.r2 = std::make_shared<const Spline>(seg.z, seg.r2_values);
        seg.re = std::make_shared<const Spline>(seg.z, re);
        seg.im = std::make_shared<const Spline>(seg.z, im);
        segments_[k] = std::move(seg);
        has_[k] = true;
        build_gap(k, k == 0 || k == 2);
    }

    breakpoints_ = {-1.0, 0.0, 1.0};
    for (int k = 0; k < 4; ++k) {
        if (!has_[k]) continue;
        breakpoints_.insert(breakpoints_.end(), segments_[k].z.begin(), segments_[k].z.end());
    }
    std::sort(breakpoints_.begin(), breakpoints_.end());
    breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
}

void DensityFunction::build_gap(int region, bool pole_at_hi) {
    const Segment& seg = segments_[region];
    GapModel g;
    g.present = true;
    g.pole = (region < 2) ? -1.0 : 1.0;
    const std::size_t n = seg.z.size();
    auto dist = [&](std::size_t i) { return std::abs(seg.z[i] - g.pole); };
    const std::size_t first = pole_at_hi ? n - 1 : 0;
    g.edge = dist(first);
    g.v_edge = v_from_r2(seg.r2_values[first]);
    // three table points near distances edge, 2*edge, 4*edge
    std::array<std::size_t, 3> pick{};
    for (int j = 0; j < 3; ++j) {
        const double target = g.edge * static_cast<double>(1 << j);
        std::size_t best = first;
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(dist(i) - target) < std::abs(dist(best) - target)) best = i;
        pick[j] = best;
    }
    const bool distinct = pick[0] != pick[1] && pick[1] != pick[2] && pick[0] != pick[2];
    if (distinct) {
        for (int j = 0; j < 3; ++j) {
            const double u = dist(pick[j]);
            const double gap = 1.0 - seg.r2_values[pick[j]];
            g.u[j] = u;
            g.w[j] = u * u / gap;
        }
        g.quadratic = true;
        // the model must stay positive on (0, edge]
        for (int k = 0; k <= 16 && g.quadratic; ++k) {
            const double u = g.edge * k / 16.0;
            double w = 0.0;
            for (int j = 0; j < 3; ++j) {
                double l = 1.0;
                for (int m = 0; m < 3; ++m)
                    if (m != j) l *= (u - g.u[m]) / (g.u[j] - g.u[m]);
                w += l * g.w[j];
            }
            if (!(w > 0.0)) g.quadratic = false;
        }
    }
    gaps_[region] = g;
}

double DensityFunction::gap_value(const GapModel& g, double u) const {
    if (!g.quadratic) return g.v_edge;
    if (u <= 0.0) return std::numeric_limits<double>::infinity();
    double w = 0.0;
    for (int j = 0; j < 3; ++j) {
        double l = 1.0;
        for (int m = 0; m < 3; ++m)
            if (m != j) l *= (u - g.u[m]) / (g.u[j] - g.u[m]);
        w += l * g.w[j];
    }
    return std::max(0.0, std::log(w / (u * u)) / (2.0 * pi));
}

double DensityFunction::spline_v(const Segment& seg, double s) const {
    return v_from_r2(std::min((*seg.r2)(s), 1.0 - 1e-16));
}

double DensityFunction::operator()(double s) const {
    if (s == 0.0) return 0.0;
    if (std::abs(s) == 1.0) return std::numeric_limits<double>::infinity();
    const int k = region_of(s);
    if (!has_[k]) return 0.0;
    const Segment& seg = segments_[k];
    if (s >= seg.lo && s <= seg.hi) return spline_v(seg, s);
    const GapModel& g = gaps_[k];
    const double d = std::abs(s - g.pole);
    if (d < std::min(std::abs(seg.lo - g.pole), std::abs(seg.hi - g.pole))) return gap_value(g, d);
    // toward 0 or infinity
    const double end = (std::abs(s - seg.lo) < std::abs(s - seg.hi)) ? seg.lo : seg.hi;
    const double v_end = spline_v(seg, end);
    const double ratio = s / end;
    return (std::abs(s) < std::abs(end)) ? v_end * std::pow(ratio, 4) : v_end * std::pow(ratio, -4);
}

bool DensityFunction::tabulated(double s) const {
    if (s == 0.0 || std::abs(s) == 1.0) return false;
    const int k = region_of(s);
    return has_[k] && s >= segments_[k].lo && s <= segments_[k].hi;
}

double DensityFunction::r_squared(double s) const {
    if (!tabulated(s)) throw input_error("point outside the tabulated reflection range");
    return (*segments_[region_of(s)].r2)(s);
}

cplx DensityFunction::r(double s) const {
    if (!tabulated(s)) throw input_error("point outside the tabulated reflection range");
    const Segment& seg = segments_[region_of(s)];
    return {(*seg.re)(s), (*seg.im)(s)};
}

bool DensityFunction::covers_negative() const { return has_[0] || has_[1]; }
bool DensityFunction::covers_positive() const { return has_[2] || has_[3]; }

std::vector<double> DensityFunction::outer_edges() const {
    std::vector<double> e;
    if (has_[0]) e.push_back(segments_[0].lo);
    if (has_[3]) e.push_back(segments_[3].hi);
    return e;
}

}  // namespace dnls
