#pragma once

#include "spindiff/constants.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace spindiff {

/// Electron occupation of the dot. `absent` models a spin-zero configuration
/// (e.g. a two-electron singlet): it switches off both the Knight shift and
/// the electron-mediated flip-flop channel.
struct ElectronConfig {
    enum class State { absent, present_up, present_down };
    State state = State::present_up;

    bool present() const { return state != State::absent; }
    /// 2*S_z: +1, -1, or 0. Enters couplings only through this factor.
    double two_sz() const {
        switch (state) {
        case State::present_up: return 1.0;
        case State::present_down: return -1.0;
        default: return 0.0;
        }
    }
    std::string name() const {
        switch (state) {
        case State::present_up: return "present_up";
        case State::present_down: return "present_down";
        default: return "absent";
        }
    }
};

/// All physical parameters of one simulated dot. Immutable after
/// construction; the single source of truth for a run.
///
/// Lengths are nm, B0 is Tesla, and every coupling is an angular frequency
/// in rad/s (energies divided by hbar at the config boundary).
struct DotModel {
    double l0_nm = 30.0;   // Fock-Darwin radius
    double z0_nm = 10.0;   // dot thickness; envelope vanishes at z = +-z0/2
    double a0_nm = 0.563;  // lattice constant
    double A0 = 0.0;       // hyperfine coupling at the origin, rad/s
    double B0_T = 2.0;     // external field along z
    double spin = 1.5;     // nuclear spin quantum number (rate constants are 3/2-specific)
    ElectronConfig electron{};
    PhysicalConstants constants{};

    /// Electron Zeeman angular frequency g_e mu_B B0 / hbar, rad/s.
    double electron_zeeman() const { return constants.g_e * constants.muB * B0_T / constants.hbar; }

    /// Number of lattice layers on each side of the midplane that fit in
    /// |z| <= z0/2.
    int half_layers() const { return static_cast<int>(std::floor(0.5 * z0_nm / a0_nm)); }
};

/// Collect every constraint violation (empty result = valid model).
std::vector<std::string> validate(const DotModel& dot);

/// One nuclear site on the lattice. Coordinates in nm.
struct Site {
    std::int64_t index = 0;
    double x = 0.0, y = 0.0, z = 0.0;
};

/// Simple-cubic lattice of spacing a0 with half-extents per axis; sites at
/// integer multiples of a0, centered on the origin. Enumeration is
/// deterministic row-major: z slowest, x fastest.
struct LatticeSpec {
    double a0_nm = 0.563;
    std::int64_t half_nx = 0, half_ny = 0, half_nz = 0;

    std::int64_t nx() const { return 2 * half_nx + 1; }
    std::int64_t ny() const { return 2 * half_ny + 1; }
    std::int64_t nz() const { return 2 * half_nz + 1; }
    std::int64_t site_count() const { return nx() * ny() * nz(); }

    bool contains(std::int64_t ix, std::int64_t iy, std::int64_t iz) const {
        return std::llabs(ix) <= half_nx && std::llabs(iy) <= half_ny && std::llabs(iz) <= half_nz;
    }
    std::int64_t index_of(std::int64_t ix, std::int64_t iy, std::int64_t iz) const {
        return ((iz + half_nz) * ny() + (iy + half_ny)) * nx() + (ix + half_nx);
    }
    Site site_at(std::int64_t ix, std::int64_t iy, std::int64_t iz) const {
        return Site{index_of(ix, iy, iz), ix * a0_nm, iy * a0_nm, iz * a0_nm};
    }

    /// Slab matching the dot thickness (z layers within |z| <= z0/2) with the
    /// given lateral half-extent in nm.
    static LatticeSpec slab(const DotModel& dot, double half_extent_nm) {
        LatticeSpec s;
        s.a0_nm = dot.a0_nm;
        s.half_nx = s.half_ny = static_cast<std::int64_t>(std::floor(half_extent_nm / dot.a0_nm));
        s.half_nz = dot.half_layers();
        return s;
    }
    /// Laterally unbounded slab (for field evaluation; sites are enumerated
    /// virtually, nothing is materialized).
    static LatticeSpec unbounded_slab(const DotModel& dot) {
        LatticeSpec s;
        s.a0_nm = dot.a0_nm;
        s.half_nx = s.half_ny = (std::int64_t(1) << 40);
        s.half_nz = dot.half_layers();
        return s;
    }
};

struct LatticeTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Materialize the lattice as a site list in index order. Throws
/// LatticeTooLarge when the count exceeds `site_cap`.
std::vector<Site> build_lattice(const LatticeSpec& spec, std::int64_t site_cap = 10'000'000);

/// Hyperfine coupling A(r) = A0 cos^2(pi z / z0) exp(-(x^2+y^2)/l0^2), rad/s.
/// Zero outside |z| <= z0/2. Purely geometric; whether the electron acts on
/// the nuclei is decided downstream by ElectronConfig.
double hyperfine_coupling(double x_nm, double y_nm, double z_nm, const DotModel& dot);
inline double hyperfine_coupling(const Site& s, const DotModel& dot) {
    return hyperfine_coupling(s.x, s.y, s.z, dot);
}

/// Secular dipolar flip-flop coefficient between two like spins, rad/s:
///
///     B_ij = (mu0 / 16 pi) (g_n mu_N)^2 (1 - 3 cos^2 theta) / (R^3 hbar)
///
/// normalized so that the truncated dipole-dipole Hamiltonian reads
/// sum_{i != j} [ 2 B_ij Iz_i Iz_j - B_ij I+_i I-_j ] over ordered pairs,
/// which reproduces the standard secular form per unordered pair.
/// theta is the angle between the pair axis and z. Throws on coincident
/// sites ("degenerate pair").
double dipolar_coupling(const Site& i, const Site& j, const PhysicalConstants& c);

} // namespace spindiff
