#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dnls/asymptotics.hpp"
#include "dnls/config.hpp"
#include "dnls/pde.hpp"
#include "dnls/scattering.hpp"

namespace dnls {

// Pass thresholds of the leading/corrected comparison.
inline constexpr double p_leading_min = 0.35;
inline constexpr double p_leading_max = 0.65;
inline constexpr double p_corrected_min = 0.60;

PotentialField scattering_potential(const RunConfig& c);
EvolutionState evolution_initial(const RunConfig& c);

struct ScatteringResult {
    ReflectionTable table;
    DiscreteSpectrum spectrum;
    double max_unitarity_violation = 0.0;
    double max_abs_r = 0.0;
};

ScatteringResult run_scatter(const RunConfig& c);
// {grid, s11, s21, r, eigenvalues, norming_constants, exclusion_radius}; complex values as [re, im].
void write_scattering_json(std::ostream& out, const ScatteringResult& s);
ScatteringResult read_scattering_json(const std::string& path);

struct AsymptoticRaySummary {
    double xi = 0.0;
    cplx T_infinity;
    double alpha_infinity = 0.0;
    double identity_error = 0.0;  // |exp(-i alpha) - T(inf)^-2|
    // closed-form h xi1 term over the E1 xi1 term, over the t values
    std::optional<cplx> h_ratio_mean;
    double h_ratio_spread = 0.0;
    std::optional<double> q_decay_exponent;  // fit of ||q_asy| - 1| over the fit window
};

struct AsymptoticRun {
    std::vector<AsymptoticRow> rows;  // xi-major, t ascending
    std::vector<AsymptoticRaySummary> summary;
};

AsymptoticRun run_asym(const RunConfig& c, const ReflectionTable& table);
void write_asym_summary_json(std::ostream& out, const std::vector<AsymptoticRaySummary>& s);
std::vector<AsymptoticRow> read_asymptotic_csv(const std::string& path);

struct RayTrace {
    double xi = 0.0;
    std::vector<double> t;
    std::vector<cplx> q;
};

struct EvolveRun {
    std::vector<RayTrace> rays;
    std::vector<Snapshot> snapshots;  // at snapshot_times
};

EvolveRun run_evolve(const RunConfig& c, const ProgressCallback& progress = {});
std::string ray_file_name(double xi);
std::string snapshot_file_name(double t);
// xi is recovered from x = 2 xi t.
RayTrace read_ray_csv(const std::string& path);

struct ComparisonRow {
    double t;
    cplx q_pde, q_lead, q_asy;
    double err_leading, err_corrected;
};

struct RayComparison {
    double xi = 0.0;
    std::vector<ComparisonRow> rows;
    std::size_t window_start = 0;  // first row of the fit window
    std::optional<double> p_leading, p_corrected;  // empty when the fit is degenerate
    double max_err_leading = 0.0, max_err_corrected = 0.0;
    double window_max_err_leading = 0.0, window_max_err_corrected = 0.0;
    bool exact_match = false;
    bool corrected_below_leading = false;
    bool pass = false;
};

struct ComparisonReport {
    std::vector<RayComparison> rays;
    bool all_pass = false;
};

ComparisonReport compare_rays(const std::vector<AsymptoticRow>& asym, const std::vector<RayTrace>& rays,
                              double fit_upper_fraction);
void write_comparison_csv(std::ostream& out, const ComparisonReport& r);
// [{xi, p_leading, p_corrected, max_err_corrected, pass, ...}]
void write_comparison_json(std::ostream& out, const ComparisonReport& r);

}  // namespace dnls
