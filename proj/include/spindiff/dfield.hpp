#pragma once

#include "spindiff/model.hpp"
#include "spindiff/rates.hpp"

#include <string>
#include <vector>

namespace spindiff {

/// Regular 2D mesh of nodes. Node (i, j) sits at (x0 + i h, y0 + j h);
/// values are stored row-major with x fastest.
struct Mesh2D {
    int nx = 0, ny = 0;
    double h_nm = 0.0;
    double x0_nm = 0.0, y0_nm = 0.0;

    double x(int i) const { return x0_nm + i * h_nm; }
    double y(int j) const { return y0_nm + j * h_nm; }
    std::size_t idx(int i, int j) const { return std::size_t(j) * nx + i; }
    std::size_t node_count() const { return std::size_t(nx) * ny; }

    /// Symmetric mesh covering [-half_extent, +half_extent]^2. Throws if the
    /// spacing does not tile the domain exactly.
    static Mesh2D centered(double half_extent_nm, double h_nm);

    bool operator==(const Mesh2D&) const = default;
};

/// Where the field probe sits in z: the midplane layer (strongest electron
/// effects) or the plain average over all slab layers.
enum class ProbeMode { midplane, layer_averaged };

/// Coarse-grained diffusion coefficient field D(x, y) in nm^2/s, plus the
/// parameters it was built from (for the CSV/JSON sidecar).
struct DiffusionField {
    Mesh2D mesh;
    std::vector<double> values; // nm^2/s, row-major
    // build metadata
    double b0_tesla = 0.0;
    double a0_rad_per_s = 0.0;
    std::string electron;
    RateParams params;
    ProbeMode probe_mode = ProbeMode::midplane;

    double at(int i, int j) const { return values[mesh.idx(i, j)]; }
    double max_value() const;
    double min_value() const;
};

/// Symmetric second-moment tensor of the pair rates, nm^2/s.
struct DiffusionTensor {
    double xx = 0.0, yy = 0.0, zz = 0.0;
    double xy = 0.0, xz = 0.0, yz = 0.0;
};

/// D(x, y) = sum_i W_ik [(x_k - x_i)^2 + (y_k - y_i)^2] / 4 with the probe k
/// snapped to the nearest lattice site at the requested z layer(s) and i
/// running over lattice neighbors within the pair cutoff.
double diffusion_coefficient_at(double x_nm, double y_nm, const DotModel& dot,
                                const LatticeSpec& lattice, const RateParams& p,
                                ProbeMode mode = ProbeMode::midplane);

/// Full second-moment tensor D^ab = sum_i W_ik (dx^a)(dx^b) / 2 at one probe.
DiffusionTensor diffusion_tensor_at(double x_nm, double y_nm, const DotModel& dot,
                                    const LatticeSpec& lattice, const RateParams& p,
                                    ProbeMode mode = ProbeMode::midplane);

/// Evaluate D on every mesh node (deterministic result independent of the
/// number of worker threads).
DiffusionField build_field(const Mesh2D& mesh, const DotModel& dot, const LatticeSpec& lattice,
                           const RateParams& p, int threads = 0, ProbeMode mode = ProbeMode::midplane);

/// Bulk diffusion coefficient with the electron omitted entirely; position
/// independent, used as the far-field reference value.
double background_diffusion_coefficient(const DotModel& dot, const RateParams& p);

} // namespace spindiff
