#pragma once

#include <cmath>
#include <numbers>

namespace spindiff {

/// Physical constants in SI units. Defaults are CODATA 2018 values; the
/// nuclear g-factor defaults to As-75 (mu = 1.43948 mu_N, I = 3/2).
/// All can be overridden from the [constants] config section.
struct PhysicalConstants {
    double mu0 = 4.0 * std::numbers::pi * 1e-7; // vacuum permeability, T m / A
    double muB = 9.2740100783e-24;              // Bohr magneton, J / T
    double muN = 5.0507837461e-27;              // nuclear magneton, J / T
    double hbar = 1.054571817e-34;              // reduced Planck constant, J s
    double g_e = 2.00231930436256;              // electron g-factor (free electron)
    double g_n = 1.43948 / 1.5;                 // nuclear g-factor, As-75

    /// Energy-to-angular-frequency conversion: E [ueV] -> omega [rad/s].
    /// This is the single place where energy inputs become rates; every
    /// coupling in the code is an angular frequency obtained as E / hbar.
    double uev_to_rad_per_s(double e_uev) const {
        constexpr double joule_per_uev = 1.602176634e-25;
        return e_uev * joule_per_uev / hbar;
    }
    double rad_per_s_to_uev(double w) const {
        constexpr double joule_per_uev = 1.602176634e-25;
        return w * hbar / joule_per_uev;
    }
};

} // namespace spindiff
