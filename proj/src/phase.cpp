#include "dnls/phase.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace dnls {

namespace {

void check_nonzero(cplx z) {
    if (z == 0.0) throw input_error("phase singular at origin");
}

}  // namespace

RayCoordinate RayCoordinate::from_xt(double x, double t) {
    if (!(t > 0.0)) throw input_error("ray: t must be positive");
    return {x / (2.0 * t), x, t};
}

RayCoordinate RayCoordinate::from_xi(double xi, double t) {
    if (!(t > 0.0)) throw input_error("ray: t must be positive");
    return {xi, 2.0 * xi * t, t};
}

cplx theta(cplx z, double xi) {
    check_nonzero(z);
    const cplx w = 1.0 / z;
    return xi * (z - w) - 0.5 * (z * z - w * w);
}

cplx theta(cplx z, const RayCoordinate& ray) { return theta(z, ray.xi); }

PhaseDerivatives theta_derivatives(cplx z, double xi) {
    check_nonzero(z);
    const double s = 2.0 * xi;
    const cplx w = 1.0 / z, w2 = w * w;
    const cplx d1 = 0.5 * s * (1.0 + w2) - (z + w2 * w);
    const cplx d2 = -s * w2 * w - 1.0 + 3.0 * w2 * w2;
    return {d1, d2};
}

PhaseDerivatives theta_derivatives(cplx z, const RayCoordinate& ray) { return theta_derivatives(z, ray.xi); }

StationaryPair stationary_points(double xi) {
    if (!(std::abs(xi) > 1.0 + 1e-9)) {
        std::ostringstream msg;
        msg << "xi = " << xi << " is inside the solitonic region |xi| <= 1 (needs |xi| > 1)";
        throw input_error(msg.str());
    }
    const double a = std::abs(xi);
    const double nu = 0.5 * (a + std::sqrt(a * a + 8.0));
    const double root = std::sqrt(nu * nu - 4.0);
    // the product of the two roots is exactly one; take the small one from it
    const double big = 0.5 * (nu + root);
    const double small = 1.0 / big;
    const double sg = xi > 0 ? 1.0 : -1.0;
    StationaryPair p;
    p.nu = nu;
    p.xi1 = sg * small;
    p.xi2 = sg * big;
    p.theta_pp_1 = theta_derivatives(p.xi1, xi).d2.real();
    p.theta_pp_2 = theta_derivatives(p.xi2, xi).d2.real();
    return p;
}

int signature_sample(cplx z, double xi) {
    const double v = (2.0 * I * theta(z, xi)).real();
    if (std::abs(v) < 1e-14) return 0;
    return v > 0 ? 1 : -1;
}

void write_signature_grid(std::ostream& out, double xi, double re_min, double re_max, double im_min,
                          double im_max, int n_re, int n_im) {
    if (n_re < 2 || n_im < 2) throw input_error("signature grid needs at least 2 points per axis");
    if (!(re_max > re_min) || !(im_max > im_min)) throw input_error("signature grid: empty range");
    out << "re_z,im_z,sign\n";
    char buf[96];
    for (int j = 0; j < n_im; ++j) {
        const double b = im_min + (im_max - im_min) * j / (n_im - 1);
        for (int i = 0; i < n_re; ++i) {
            const double a = re_min + (re_max - re_min) * i / (n_re - 1);
            const cplx z(a, b);
            const int s = z == 0.0 ? 0 : signature_sample(z, xi);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", a, b, s);
            out << buf;
        }
    }
}

}  // namespace dnls
