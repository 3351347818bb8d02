#pragma once

#include "spindiff/dfield.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spindiff {

/// Nuclear polarization <I^z>(x, y) on the solver mesh, dimensionless
/// (normalized so the initial peak is 1).
struct PolarizationField {
    Mesh2D mesh;
    std::vector<double> values;
    double time_s = 0.0;

    double at(int i, int j) const { return values[mesh.idx(i, j)]; }
    double sum() const;
    double max_value() const;
    double min_value() const;
};

/// Gaussian initial polarization exp(-(x^2+y^2)/r0^2), amplitude 1.
struct InitialCondition {
    double r0_nm = 30.0;
};

enum class Scheme { explicit_euler, adi };

struct SolverConfig {
    Scheme scheme = Scheme::explicit_euler;
    double dt_s = 0.0;                  // 0 = auto (see stability_dt / notes below)
    double t_end_s = 0.0;
    std::vector<double> snapshot_times; // full-field snapshots; t_end is always included
    double sample_dt_s = 0.0;           // observer cadence; 0 = t_end / 512
    int threads = 0;
};

struct SolverInstability : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// exp(-(x^2+y^2)/r0^2) with zero boundary nodes and t = 0. Appends a
/// warning when r0 exceeds a quarter of the domain (boundary truncation
/// then distorts the open-boundary limit the setup is meant to mimic).
PolarizationField make_initial(const Mesh2D& mesh, double r0_nm, std::vector<std::string>* warnings = nullptr);

/// Largest stable explicit step 0.9 * h^2 / (4 max D); +inf when max D = 0
/// (evolve clamps the step to t_end).
double stability_dt(const DiffusionField& d);

/// Observer invoked at a fixed step cadence (and at t_end) with the current
/// state; used to record decay curves without storing every field.
using EvolveObserver = std::function<void(const PolarizationField&)>;

/// Time-integrate dI/dt = D(x,y) (Ixx + Iyy) with Dirichlet-zero boundary.
///
/// The equation is advanced in the non-divergence form written above (the
/// mass-conserving form div(D grad I) is available via
/// `divergence_form = true` for sensitivity studies, not as the default).
///
/// explicit_euler: forward Euler, dt capped at the stability limit.
/// adi: Peaceman-Rachford splitting; unconditionally stable; dt_s = 0 picks
/// t_end / 2000 capped below by the explicit limit.
///
/// Aborts with SolverInstability if any value exceeds 1.01x the initial max.
/// Returns the snapshots in request order (times land on the step grid; the
/// actual time is recorded in each snapshot).
std::vector<PolarizationField> evolve(const PolarizationField& init, const DiffusionField& d,
                                      const SolverConfig& cfg, const EvolveObserver& observer = {},
                                      bool divergence_form = false);

} // namespace spindiff
