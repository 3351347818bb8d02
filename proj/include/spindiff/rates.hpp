#pragma once

#include "spindiff/model.hpp"

#include <cstdint>

namespace spindiff {

/// Truncation radii for the pairwise sums. Both are hard cutoffs: the
/// flip-flop rate is evaluated only for pairs within `pair_cutoff_nm`, and
/// the broadening sum runs over third sites within `broadening_cutoff_nm`
/// of either member of the pair.
struct RateParams {
    double pair_cutoff_nm = 3.0 * 0.563;
    double broadening_cutoff_nm = 6.0 * 0.563;

    static RateParams defaults_for(double a0_nm) {
        return RateParams{3.0 * a0_nm, 6.0 * a0_nm};
    }
};

/// One evaluated pair rate (site indices refer to a materialized lattice).
struct PairRate {
    std::int64_t i = 0, k = 0;
    double w = 0.0; // rad/s
};

/// Knight-shift detuning between the pair, rad/s: (A_i - A_k) * 2 S_z.
/// Zero when the electron is absent. Enters the rate only squared, so the
/// S_z sign is observable only through the mediated coupling.
double knight_detuning(const Site& i, const Site& k, const DotModel& dot);

/// Flip-flop coupling C_ik = B_ik + 2 S_z * A_i A_k / (4 w_e), rad/s, where
/// w_e is the electron Zeeman frequency. Reduces to the bare dipolar
/// coupling when the electron is absent. Throws when B0 <= 0 ("secular
/// approximation invalid"): the whole rate framework assumes a strong field.
double c_coefficient(const Site& i, const Site& k, const DotModel& dot);

/// Dipolar broadening g_ik = 80 sum_{j != i,k} (C_ij - C_kj)^2, (rad/s)^2.
/// The j sum runs over lattice sites within `broadening_cutoff_nm` of i or k,
/// in ascending site-index order (fixed summation order for reproducibility).
double broadening(const Site& i, const Site& k, const DotModel& dot, const LatticeSpec& lattice,
                  const RateParams& p);

/// The closed-form rate for spin-3/2 given the three ingredients: coupling c
/// (rad/s), Knight detuning (rad/s) and broadening g ((rad/s)^2):
///
///   W = sqrt(2 pi) c^2 [ (17/5) (d^2 + g)^{-1/2}
///                      + (12/5) (d^2 + 64 c^2 + g)^{-1/2}
///                      + (9/10) (d^2 + 256 c^2 + g)^{-1/2} ]
double flipflop_rate_formula(double c, double detuning, double g);

/// Full pairwise flip-flop rate W_ik, rad/s. Zero beyond the pair cutoff;
/// symmetric in (i, k) bitwise. Throws for spin != 3/2.
double flipflop_rate(const Site& i, const Site& k, const DotModel& dot, const LatticeSpec& lattice,
                     const RateParams& p);

} // namespace spindiff
