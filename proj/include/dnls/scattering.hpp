#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dnls/numerics.hpp"

namespace dnls {

// Initial profile sampled on [-L, L] with q -> -1 / +1 at the left / right edge.
class PotentialField {
public:
    PotentialField(ComplexGrid1D grid, double background_tolerance = 1e-10);

    const ComplexGrid1D& grid() const { return grid_; }
    double half_width() const { return half_width_; }
    double background_tolerance() const { return background_tolerance_; }
    cplx operator()(double x) const { return grid_.interpolate(x); }

private:
    ComplexGrid1D grid_;
    double half_width_;
    double background_tolerance_;
};

PotentialField sample_potential(const std::function<cplx(double)>& q0, double L, double dx,
                                double background_tolerance = 1e-10);

// CSV "x,re_q,im_q" with header; spacing must be uniform.
PotentialField load_profile_csv(const std::string& path, double background_tolerance = 1e-10);

enum class Side { plus, minus };

struct ScatteringOptions {
    double exclusion_radius = 1e-3;
    double max_step = 0.004;
    double phase_resolution = 0.05; // RK4 step <= phase_resolution / |zeta|
    int threads = 0;                // 0: hardware concurrency

    void validate() const;
};

inline cplx lambda_of(cplx z) { return 0.5 * (z + 1.0 / z); }
inline cplx zeta_of(cplx z) { return 0.5 * (z - 1.0 / z); }

void check_admissible(cplx z, double exclusion_radius);

// Jost matrix psi^{+/-}(z; x) at x = 0, normalised to (I +/- sigma1/z) e^{-i zeta x sigma3}.
Mat2 jost_matrix(const PotentialField& q, cplx z, Side side, const ScatteringOptions& opt = {});
Mat2 jost_matrix_at(const PotentialField& q, cplx z, Side side, double x,
                    const ScatteringOptions& opt = {});

struct ScatteringSample {
    double z;
    cplx s11;
    cplx s21;
    cplx r;
};

ScatteringSample scattering_coefficients(const PotentialField& q, double z,
                                         const ScatteringOptions& opt = {});

// Wronskian form of s11 continued to complex z (uses only the columns
// analytic in the upper half plane).
cplx s11_at(const PotentialField& q, cplx z, const ScatteringOptions& opt = {});

struct ReflectionTable {
    std::vector<double> z_grid;
    std::vector<ScatteringSample> samples;
    double exclusion_radius = 1e-3;
};

// Real z grid, geometric in log|z|, clustered at +/-1 and closed under z -> 1/z
// on [1/z_max, z_max]; points below 1/z_max down to z_min are added
// log-uniformly. n = points on each of the four branches.
struct ZGridSpec {
    double z_min = 0.02;
    double z_max = 5.0;
    int n = 120;
    double exclusion_radius = 1e-3;
    bool negative = true;

    void validate() const;
    bool operator==(const ZGridSpec&) const = default;
};

std::vector<double> make_z_grid(const ZGridSpec& spec);

ReflectionTable reflection_table(const PotentialField& q, const std::vector<double>& z_grid,
                                 const ScatteringOptions& opt = {});

// Largest |r(z) - conj(r(1/z))| over grid pairs (0 if there are none).
double max_symmetry_violation(const ReflectionTable& table);
double max_unitarity_violation(const ReflectionTable& table);

struct DiscreteSpectrum {
    std::vector<cplx> eigenvalues;
    std::vector<cplx> norming_constants;
    std::vector<std::string> warnings;
};

DiscreteSpectrum find_discrete_spectrum(const PotentialField& q, int n_arc_samples,
                                        const ScatteringOptions& opt = {});

cplx norming_constant(const PotentialField& q, cplx zj, const ScatteringOptions& opt = {});

struct TraceEvaluation {
    cplx s11;
    double tail_estimate;  // relative size of the neglected |s| > max|grid| part
};

TraceEvaluation trace_formula_eval(const DiscreteSpectrum& spectrum, const ReflectionTable& table,
                                   cplx z);

}  // namespace dnls
