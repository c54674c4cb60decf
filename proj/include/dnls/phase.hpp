#pragma once

#include <ostream>

#include "dnls/numerics.hpp"

namespace dnls {

// Ray x = 2 xi t.
struct RayCoordinate {
    double xi;
    double x;
    double t;

    static RayCoordinate from_xt(double x, double t);
    static RayCoordinate from_xi(double xi, double t);
    // x/t = 2 xi
    double speed() const { return 2.0 * xi; }
};

// theta(z) = (x/t) zeta(z) - (z^2 - z^-2)/2, per unit t.
cplx theta(cplx z, double xi);
cplx theta(cplx z, const RayCoordinate& ray);

struct PhaseDerivatives {
    cplx d1;
    cplx d2;
};

PhaseDerivatives theta_derivatives(cplx z, double xi);
PhaseDerivatives theta_derivatives(cplx z, const RayCoordinate& ray);

struct StationaryPair {
    double xi1;
    double xi2;
    double theta_pp_1;
    double theta_pp_2;
    double nu;
};

// Real critical points of theta with xi1 * xi2 = 1; requires |xi| > 1 + 1e-9.
StationaryPair stationary_points(double xi);

// Sign of Re(2 i theta(z)); |value| < 1e-14 counts as 0.
int signature_sample(cplx z, double xi);

// CSV "re_z,im_z,sign" on an n_re x n_im lattice (n >= 2 each).
void write_signature_grid(std::ostream& out, double xi, double re_min, double re_max, double im_min,
                          double im_max, int n_re, int n_im);

}  // namespace dnls
