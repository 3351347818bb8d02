#include "spindiff/rates.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spindiff {

namespace {

std::int64_t lattice_coord(double x_nm, double a0_nm) {
    return static_cast<std::int64_t>(std::llround(x_nm / a0_nm));
}

} // namespace

double knight_detuning(const Site& i, const Site& k, const DotModel& dot) {
    const double two_sz = dot.electron.two_sz();
    if (two_sz == 0.0) return 0.0;
    return (hyperfine_coupling(i, dot) - hyperfine_coupling(k, dot)) * two_sz;
}

double c_coefficient(const Site& i, const Site& k, const DotModel& dot) {
    if (!(dot.B0_T > 0.0)) throw std::domain_error("c_coefficient: secular approximation invalid (B0 <= 0)");
    const double b = dipolar_coupling(i, k, dot.constants);
    const double two_sz = dot.electron.two_sz();
    if (two_sz == 0.0) return b;
    return b + two_sz * hyperfine_coupling(i, dot) * hyperfine_coupling(k, dot) / (4.0 * dot.electron_zeeman());
}

double broadening(const Site& i, const Site& k, const DotModel& dot, const LatticeSpec& lattice,
                  const RateParams& p) {
    const double a0 = lattice.a0_nm;
    const std::int64_t ix = lattice_coord(i.x, a0), iy = lattice_coord(i.y, a0), iz = lattice_coord(i.z, a0);
    const std::int64_t kx = lattice_coord(k.x, a0), ky = lattice_coord(k.y, a0), kz = lattice_coord(k.z, a0);

    const double cut2 = p.broadening_cutoff_nm * p.broadening_cutoff_nm;
    const std::int64_t reach = static_cast<std::int64_t>(std::floor(p.broadening_cutoff_nm / a0));

    const std::int64_t xlo = std::max(std::min(ix, kx) - reach, -lattice.half_nx);
    const std::int64_t xhi = std::min(std::max(ix, kx) + reach, lattice.half_nx);
    const std::int64_t ylo = std::max(std::min(iy, ky) - reach, -lattice.half_ny);
    const std::int64_t yhi = std::min(std::max(iy, ky) + reach, lattice.half_ny);
    const std::int64_t zlo = std::max(std::min(iz, kz) - reach, -lattice.half_nz);
    const std::int64_t zhi = std::min(std::max(iz, kz) + reach, lattice.half_nz);

    // Ascending site index == lexicographic (z, y, x) on the generated lattice.
    double sum = 0.0;
    for (std::int64_t jz = zlo; jz <= zhi; ++jz)
        for (std::int64_t jy = ylo; jy <= yhi; ++jy)
            for (std::int64_t jx = xlo; jx <= xhi; ++jx) {
                if (jx == ix && jy == iy && jz == iz) continue;
                if (jx == kx && jy == ky && jz == kz) continue;
                const double dix = double(jx - ix), diy = double(jy - iy), diz = double(jz - iz);
                const double dkx = double(jx - kx), dky = double(jy - ky), dkz = double(jz - kz);
                const double ri2 = (dix * dix + diy * diy + diz * diz) * a0 * a0;
                const double rk2 = (dkx * dkx + dky * dky + dkz * dkz) * a0 * a0;
                if (ri2 > cut2 && rk2 > cut2) continue;
                const Site j = lattice.site_at(jx, jy, jz);
                const double d = c_coefficient(i, j, dot) - c_coefficient(k, j, dot);
                sum += d * d;
            }
    return 80.0 * sum;
}

double flipflop_rate_formula(double c, double detuning, double g) {
    const double s2pi = std::sqrt(2.0 * std::numbers::pi);
    const double c2 = c * c;
    const double d2 = detuning * detuning;
    return s2pi * c2 *
           ((17.0 / 5.0) / std::sqrt(d2 + g) + (12.0 / 5.0) / std::sqrt(d2 + 64.0 * c2 + g) +
            (9.0 / 10.0) / std::sqrt(d2 + 256.0 * c2 + g));
}

double flipflop_rate(const Site& i, const Site& k, const DotModel& dot, const LatticeSpec& lattice,
                     const RateParams& p) {
    if (dot.spin != 1.5) throw std::domain_error("flipflop_rate: unsupported spin (constants require 3/2)");
    const double dx = i.x - k.x, dy = i.y - k.y, dz = i.z - k.z;
    const double r2 = dx * dx + dy * dy + dz * dz;
    if (r2 > p.pair_cutoff_nm * p.pair_cutoff_nm) return 0.0;
    const double c = c_coefficient(i, k, dot);
    const double d = knight_detuning(i, k, dot);
    const double g = broadening(i, k, dot, lattice, p);
    return flipflop_rate_formula(c, d, g);
}

} // namespace spindiff
