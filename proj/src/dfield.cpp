#include "spindiff/dfield.hpp"

#include "spindiff/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spindiff {

Mesh2D Mesh2D::centered(double half_extent_nm, double h_nm) {
    if (!(half_extent_nm > 0.0) || !(h_nm > 0.0)) throw std::invalid_argument("mesh: extent and spacing must be > 0");
    const double n_d = 2.0 * half_extent_nm / h_nm;
    const long long n = std::llround(n_d);
    if (std::abs(n_d - double(n)) > 1e-9) throw std::invalid_argument("mesh: spacing does not tile the domain exactly");
    Mesh2D m;
    m.nx = m.ny = static_cast<int>(n) + 1;
    if (m.nx < 3) throw std::invalid_argument("mesh: need at least 3 nodes per axis");
    m.h_nm = h_nm;
    m.x0_nm = m.y0_nm = -half_extent_nm;
    return m;
}

double DiffusionField::max_value() const { return *std::max_element(values.begin(), values.end()); }
double DiffusionField::min_value() const { return *std::min_element(values.begin(), values.end()); }

namespace {

// Dipolar coupling for an integer lattice offset, rad/s.
double offset_dipolar(int dx, int dy, int dz, double a0_nm, const PhysicalConstants& c) {
    const double r2u = double(dx * dx + dy * dy + dz * dz);
    if (r2u == 0.0) return 0.0;
    const double angular = (r2u - 3.0 * double(dz * dz)) / r2u;
    const double r_m = std::sqrt(r2u) * a0_nm * 1e-9;
    const double gm = c.g_n * c.muN;
    return (c.mu0 / (16.0 * std::numbers::pi)) * gm * gm * angular / (r_m * r_m * r_m * c.hbar);
}

struct JRecord {
    int dx, dy, dz;  // offset of site j relative to the probe k
    double db;       // B(j - i) - B(j - k)
};

struct PairOffset {
    int dx, dy, dz;
    double b;                    // dipolar coupling of the pair
    double dxy2;                 // (dx^2 + dy^2) a0^2, nm^2
    std::vector<JRecord> js;     // broadening third sites, ascending (z,y,x)
    double sum_abs_db = 0.0;     // for the skip bound
    // per probe layer pz (index pz + half_nz): sum of db^2 over js with
    // |pz + j.dz| <= half_nz
    std::vector<double> s1_by_layer;
};

// Precomputed pairwise geometry for one (dot, lattice, params) combination.
struct FieldEngine {
    const DotModel& dot;
    const LatticeSpec& lattice;
    RateParams params;
    int nzh;                      // slab half layer count
    int reach_pair, reach_broad, reach_total;
    double mu = 0.0;              // 2 S_z / (4 w_e), 0 when electron absent
    double two_sz = 0.0;
    std::vector<PairOffset> pairs;
    std::vector<double> cz;       // cos^2(pi z / z0) per layer, index n + nzh

    FieldEngine(const DotModel& d, const LatticeSpec& lat, const RateParams& p)
        : dot(d), lattice(lat), params(p) {
        if (dot.spin != 1.5) throw std::domain_error("field engine: unsupported spin (constants require 3/2)");
        if (!(dot.B0_T > 0.0)) throw std::domain_error("field engine: secular approximation invalid (B0 <= 0)");
        if (lattice.a0_nm != dot.a0_nm) throw std::invalid_argument("field engine: lattice spacing != dot lattice constant");
        nzh = static_cast<int>(std::min<std::int64_t>(lattice.half_nz, 1 << 20));
        const double a0 = dot.a0_nm;
        reach_pair = static_cast<int>(std::floor(params.pair_cutoff_nm / a0));
        reach_broad = static_cast<int>(std::floor(params.broadening_cutoff_nm / a0));
        reach_total = reach_pair + reach_broad;
        two_sz = dot.electron.two_sz();
        mu = two_sz == 0.0 ? 0.0 : two_sz / (4.0 * dot.electron_zeeman());

        cz.resize(2 * nzh + 1);
        for (int n = -nzh; n <= nzh; ++n) {
            const double c = std::cos(std::numbers::pi * (n * a0) / dot.z0_nm);
            cz[n + nzh] = c * c;
        }

        const double pc2 = params.pair_cutoff_nm * params.pair_cutoff_nm;
        const double bc2 = params.broadening_cutoff_nm * params.broadening_cutoff_nm;
        for (int pz = -reach_pair; pz <= reach_pair; ++pz)
            for (int py = -reach_pair; py <= reach_pair; ++py)
                for (int px = -reach_pair; px <= reach_pair; ++px) {
                    if (px == 0 && py == 0 && pz == 0) continue;
                    const double r2 = double(px * px + py * py + pz * pz) * a0 * a0;
                    if (r2 > pc2) continue;
                    PairOffset po;
                    po.dx = px; po.dy = py; po.dz = pz;
                    po.b = offset_dipolar(px, py, pz, a0, dot.constants);
                    po.dxy2 = double(px * px + py * py) * a0 * a0;
                    const int n = reach_broad + std::max({std::abs(px), std::abs(py), std::abs(pz)});
                    for (int jz = -n; jz <= n; ++jz)
                        for (int jy = -n; jy <= n; ++jy)
                            for (int jx = -n; jx <= n; ++jx) {
                                if (jx == 0 && jy == 0 && jz == 0) continue;
                                if (jx == px && jy == py && jz == pz) continue;
                                const double rk2 = double(jx * jx + jy * jy + jz * jz) * a0 * a0;
                                const double ri2 =
                                    double((jx - px) * (jx - px) + (jy - py) * (jy - py) + (jz - pz) * (jz - pz)) * a0 * a0;
                                if (ri2 > bc2 && rk2 > bc2) continue;
                                JRecord jr;
                                jr.dx = jx; jr.dy = jy; jr.dz = jz;
                                jr.db = offset_dipolar(jx - px, jy - py, jz - pz, a0, dot.constants) -
                                        offset_dipolar(jx, jy, jz, a0, dot.constants);
                                po.js.push_back(jr);
                                po.sum_abs_db += std::abs(jr.db);
                            }
                    po.s1_by_layer.assign(2 * nzh + 1, 0.0);
                    for (int pl = -nzh; pl <= nzh; ++pl) {
                        double s1 = 0.0;
                        for (const JRecord& jr : po.js)
                            if (std::abs(pl + jr.dz) <= nzh) s1 += jr.db * jr.db;
                        po.s1_by_layer[pl + nzh] = s1;
                    }
                    pairs.push_back(std::move(po));
                }
    }

    bool xy_interior(std::int64_t kx, std::int64_t ky) const {
        return std::llabs(kx) + reach_total <= lattice.half_nx && std::llabs(ky) + reach_total <= lattice.half_ny;
    }

    // Evaluate every pair rate at one probe and hand (W, pair) to the sink.
    template <class Sink>
    void eval_probe(std::int64_t kx, std::int64_t ky, int pz, Sink&& sink) const {
        const double a0 = dot.a0_nm;
        const double inv_l02 = 1.0 / (dot.l0_nm * dot.l0_nm);
        const double sx = kx * a0, sy = ky * a0;
        const double g0 = std::exp(-(sx * sx + sy * sy) * inv_l02);
        const double ag = dot.A0 * g0;
        const bool fast = xy_interior(kx, ky);

        // shifted radial envelopes: A(kx+n, ky+m, z) = ag * cz * ex[n] * ey[m]
        const int nm = reach_total;
        std::vector<double> ex(2 * nm + 1), ey(2 * nm + 1);
        double tmax = 1.0;
        if (ag != 0.0) {
            for (int n = -nm; n <= nm; ++n) {
                ex[n + nm] = std::exp(-(2.0 * sx * n * a0 + n * a0 * n * a0) * inv_l02);
                ey[n + nm] = std::exp(-(2.0 * sy * n * a0 + n * a0 * n * a0) * inv_l02);
            }
            tmax = std::exp(2.0 * (std::abs(sx) + std::abs(sy)) * nm * a0 * inv_l02);
        }

        for (const PairOffset& po : pairs) {
            const int iz = pz + po.dz;
            if (std::abs(iz) > nzh) continue;
            const std::int64_t ix = kx + po.dx, iy = ky + po.dy;
            if (!fast && (std::llabs(ix) > lattice.half_nx || std::llabs(iy) > lattice.half_ny)) continue;

            double c = po.b, det = 0.0, da = 0.0;
            if (ag != 0.0 && two_sz != 0.0) {
                const double tk = cz[pz + nzh];
                const double ti = cz[iz + nzh] * ex[po.dx + nm] * ey[po.dy + nm];
                const double ak = ag * tk, ai = ag * ti;
                c = po.b + mu * ai * ak;
                da = ai - ak;
                det = da * two_sz;
            }

            double g;
            const double s1 = po.s1_by_layer[pz + nzh];
            if (fast) {
                bool need_j = false;
                if (da != 0.0) {
                    const double amax = ag * tmax;
                    const double lin = std::abs(mu * da) * amax;
                    const double bound = 2.0 * lin * po.sum_abs_db + lin * lin * double(po.js.size());
                    need_j = bound > 1e-13 * s1;
                }
                if (need_j) {
                    double acc1 = 0.0, acc2 = 0.0;
                    for (const JRecord& jr : po.js) {
                        if (std::abs(pz + jr.dz) > nzh) continue;
                        const double tj = cz[pz + jr.dz + nzh] * ex[jr.dx + nm] * ey[jr.dy + nm];
                        acc1 += jr.db * tj;
                        acc2 += tj * tj;
                    }
                    const double mda = mu * da;
                    g = 80.0 * (s1 + 2.0 * mda * ag * acc1 + mda * mda * ag * ag * acc2);
                } else {
                    g = 80.0 * s1;
                }
            } else {
                // near a lattice boundary: redo the j sum with bounds checks
                double acc = 0.0;
                for (const JRecord& jr : po.js) {
                    if (std::abs(pz + jr.dz) > nzh) continue;
                    const std::int64_t jx = kx + jr.dx, jy = ky + jr.dy;
                    if (std::llabs(jx) > lattice.half_nx || std::llabs(jy) > lattice.half_ny) continue;
                    double d = jr.db;
                    if (ag != 0.0 && two_sz != 0.0) {
                        const double tj = cz[pz + jr.dz + nzh] * ex[jr.dx + nm] * ey[jr.dy + nm];
                        d += mu * da * ag * tj;
                    }
                    acc += d * d;
                }
                g = 80.0 * acc;
            }

            sink(flipflop_rate_formula(c, det, g), po);
        }
    }

    double d_scalar(std::int64_t kx, std::int64_t ky, int pz) const {
        double d = 0.0;
        eval_probe(kx, ky, pz, [&](double w, const PairOffset& po) { d += w * po.dxy2 * 0.25; });
        return d;
    }
};

std::int64_t snap(double x_nm, double a0_nm) { return static_cast<std::int64_t>(std::llround(x_nm / a0_nm)); }

double probe_value(const FieldEngine& eng, double x_nm, double y_nm, ProbeMode mode) {
    const std::int64_t kx = snap(x_nm, eng.dot.a0_nm), ky = snap(y_nm, eng.dot.a0_nm);
    if (mode == ProbeMode::midplane) return eng.d_scalar(kx, ky, 0);
    double sum = 0.0;
    for (int pz = -eng.nzh; pz <= eng.nzh; ++pz) sum += eng.d_scalar(kx, ky, pz);
    return sum / double(2 * eng.nzh + 1);
}

} // namespace

double diffusion_coefficient_at(double x_nm, double y_nm, const DotModel& dot, const LatticeSpec& lattice,
                                const RateParams& p, ProbeMode mode) {
    FieldEngine eng(dot, lattice, p);
    return probe_value(eng, x_nm, y_nm, mode);
}

DiffusionTensor diffusion_tensor_at(double x_nm, double y_nm, const DotModel& dot, const LatticeSpec& lattice,
                                    const RateParams& p, ProbeMode mode) {
    FieldEngine eng(dot, lattice, p);
    const std::int64_t kx = snap(x_nm, dot.a0_nm), ky = snap(y_nm, dot.a0_nm);
    DiffusionTensor t;
    const int lo = mode == ProbeMode::midplane ? 0 : -eng.nzh;
    const int hi = mode == ProbeMode::midplane ? 0 : eng.nzh;
    const double a0 = dot.a0_nm;
    int layers = 0;
    for (int pz = lo; pz <= hi; ++pz, ++layers)
        eng.eval_probe(kx, ky, pz, [&](double w, auto& po) {
            const double dx = po.dx * a0, dy = po.dy * a0, dz = po.dz * a0;
            t.xx += w * dx * dx * 0.5;
            t.yy += w * dy * dy * 0.5;
            t.zz += w * dz * dz * 0.5;
            t.xy += w * dx * dy * 0.5;
            t.xz += w * dx * dz * 0.5;
            t.yz += w * dy * dz * 0.5;
        });
    const double inv = 1.0 / layers;
    t.xx *= inv; t.yy *= inv; t.zz *= inv; t.xy *= inv; t.xz *= inv; t.yz *= inv;
    return t;
}

DiffusionField build_field(const Mesh2D& mesh, const DotModel& dot, const LatticeSpec& lattice,
                           const RateParams& p, int threads, ProbeMode mode) {
    FieldEngine eng(dot, lattice, p);
    DiffusionField f;
    f.mesh = mesh;
    f.values.assign(mesh.node_count(), 0.0);
    f.b0_tesla = dot.B0_T;
    f.a0_rad_per_s = dot.A0;
    f.electron = dot.electron.name();
    f.params = p;
    f.probe_mode = mode;
    parallel_for_chunks(std::size_t(mesh.ny), threads, [&](std::size_t jlo, std::size_t jhi) {
        for (std::size_t j = jlo; j < jhi; ++j)
            for (int i = 0; i < mesh.nx; ++i)
                f.values[mesh.idx(i, int(j))] = probe_value(eng, mesh.x(i), mesh.y(int(j)), mode);
    });
    return f;
}

double background_diffusion_coefficient(const DotModel& dot, const RateParams& p) {
    DotModel bulk = dot;
    bulk.electron.state = ElectronConfig::State::absent;
    return diffusion_coefficient_at(0.0, 0.0, bulk, LatticeSpec::unbounded_slab(bulk), p);
}

} // namespace spindiff
