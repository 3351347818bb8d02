#include "spindiff/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace spindiff {

std::vector<std::string> validate(const DotModel& dot) {
    std::vector<std::string> errs;
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0)) errs.push_back(std::string(name) + " must be > 0, got " + std::to_string(v));
    };
    positive(dot.l0_nm, "l0_nm");
    positive(dot.z0_nm, "z0_nm");
    positive(dot.a0_nm, "a0_nm");
    positive(dot.B0_T, "B0_T");
    if (dot.A0 < 0.0) errs.push_back("A0 must be >= 0");
    if (dot.spin != 1.5) errs.push_back("unsupported spin: rate constants require spin 3/2");
    const PhysicalConstants& c = dot.constants;
    positive(c.mu0, "constants.mu0");
    positive(c.muB, "constants.muB");
    positive(c.muN, "constants.muN");
    positive(c.hbar, "constants.hbar");
    if (c.g_e == 0.0) errs.push_back("constants.g_e must be nonzero");
    if (c.g_n == 0.0) errs.push_back("constants.g_n must be nonzero");
    return errs;
}

std::vector<Site> build_lattice(const LatticeSpec& spec, std::int64_t site_cap) {
    const std::int64_t n = spec.site_count();
    if (n > site_cap) {
        std::ostringstream os;
        os << "lattice of " << n << " sites exceeds cap of " << site_cap;
        throw LatticeTooLarge(os.str());
    }
    std::vector<Site> sites;
    sites.reserve(static_cast<std::size_t>(n));
    for (std::int64_t iz = -spec.half_nz; iz <= spec.half_nz; ++iz)
        for (std::int64_t iy = -spec.half_ny; iy <= spec.half_ny; ++iy)
            for (std::int64_t ix = -spec.half_nx; ix <= spec.half_nx; ++ix)
                sites.push_back(spec.site_at(ix, iy, iz));
    return sites;
}

double hyperfine_coupling(double x_nm, double y_nm, double z_nm, const DotModel& dot) {
    if (std::abs(z_nm) > 0.5 * dot.z0_nm) return 0.0;
    const double cz = std::cos(std::numbers::pi * z_nm / dot.z0_nm);
    return dot.A0 * cz * cz * std::exp(-(x_nm * x_nm + y_nm * y_nm) / (dot.l0_nm * dot.l0_nm));
}

double dipolar_coupling(const Site& i, const Site& j, const PhysicalConstants& c) {
    const double dx = i.x - j.x, dy = i.y - j.y, dz = i.z - j.z;
    const double r2_nm = dx * dx + dy * dy + dz * dz;
    if (r2_nm == 0.0) throw std::invalid_argument("dipolar_coupling: degenerate pair");
    // (r^2 - 3 dz^2)/r^2 keeps lattice magic angles exactly zero.
    const double angular = (r2_nm - 3.0 * dz * dz) / r2_nm;
    const double r_m = std::sqrt(r2_nm) * 1e-9;
    const double gm = c.g_n * c.muN;
    return (c.mu0 / (16.0 * std::numbers::pi)) * gm * gm * angular / (r_m * r_m * r_m * c.hbar);
}

} // namespace spindiff
