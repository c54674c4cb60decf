#pragma once

#include <functional>
#include <memory>
#include <ostream>
#include <vector>

#include "dnls/numerics.hpp"

namespace dnls {

// q0 = tanh(x) + amplitude * exp(-(x - center)^2 / width^2); pure kink ignores the rest.
struct InitialProfileSpec {
    enum class Kind { pure_kink, perturbed_kink };
    Kind kind = Kind::perturbed_kink;
    cplx amplitude{0.1, 0.0};
    double center = 0.0;
    double width = 2.0;

    cplx operator()(double x) const;
};

struct PdeOptions {
    double sponge_width = 10.0;
    double sponge_rate = 2.0;       // peak damping rate
    double stability_factor = 0.2;  // dt <= factor * dx^2
    double boundary_tolerance = 1e-8;
};

struct SpongeProfile;

struct EvolutionState {
    ComplexGrid1D grid;
    double t = 0.0;
    PdeOptions options;
    double charge0 = 0.0;
    // time integral of the charge flux into the sponge (trapezoid per step)
    double sponge_charge_change = 0.0;
    std::shared_ptr<const SpongeProfile> sponge;

    double sponge_width() const { return options.sponge_width; }
    double half_width() const { return -grid.x0(); }
};

// Grid on [-L, L]; L/dx must be an integer.
EvolutionState make_initial(const InitialProfileSpec& spec, double L, double dx, const PdeOptions& opt = {});
// Arbitrary data on a symmetric uniform grid.
EvolutionState make_state(ComplexGrid1D grid, const PdeOptions& opt = {});

double default_dt(const EvolutionState& s);

// One RK4 step of size dt (negative dt runs backward).
EvolutionState step(EvolutionState s, double dt);

using ProgressCallback = std::function<void(double t)>;

// Steps of equal size <= dt ending exactly at t_target; progress is called at
// every integer time crossed.
EvolutionState evolve_to(EvolutionState s, double t_target, double dt, const ProgressCallback& progress = {});

struct Snapshot {
    double t;
    ComplexGrid1D grid;
};

std::vector<Snapshot> evolve_with_snapshots(EvolutionState s, const std::vector<double>& times, double dt,
                                            const ProgressCallback& progress = {});

// q(2 xi t, t) by cubic interpolation; every t must be a snapshot time.
std::vector<cplx> sample_along_ray(const std::vector<Snapshot>& history, double xi, const std::vector<double>& t_values,
                                   double sponge_width);

// Composite Simpson of |q|^2 - 1 (3/8 rule on the last three intervals if their count is odd).
double renormalized_charge(const ComplexGrid1D& grid);
inline double renormalized_charge(const EvolutionState& s) { return renormalized_charge(s.grid); }

void write_snapshot_csv(std::ostream& out, const ComplexGrid1D& grid);
void write_ray_csv(std::ostream& out, double xi, const std::vector<double>& t_values, const std::vector<cplx>& q);

}  // namespace dnls
