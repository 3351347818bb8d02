#include "spindiff/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spindiff {

void RateNetwork::apply(const std::vector<double>& y, std::vector<double>& dy) const {
    const std::size_t n = size();
    dy.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::int64_t p = row_ptr[k]; p < row_ptr[k + 1]; ++p) acc += w[p] * y[col[p]];
        dy[k] = acc - row_sum[k] * y[k];
    }
}

RateNetwork build_network(const std::vector<Site>& sites, const DotModel& dot, const LatticeSpec& lattice,
                          const RateParams& p, std::int64_t site_cap) {
    if (std::int64_t(sites.size()) > site_cap) {
        std::ostringstream os;
        os << "build_network: " << sites.size() << " sites exceed cap " << site_cap;
        throw std::invalid_argument(os.str());
    }
    RateNetwork net;
    net.sites = sites;
    const std::size_t n = sites.size();
    net.row_ptr.assign(n + 1, 0);

    const double a0 = lattice.a0_nm;
    const double cut2 = p.pair_cutoff_nm * p.pair_cutoff_nm;
    auto coord = [&](double v) { return static_cast<std::int64_t>(std::llround(v / a0)); };

    // W for electron-free pairs away from the lattice boundary depends only
    // on the pair offset; memoize those. The key covers offsets up to the
    // pair reach.
    const bool uniform = dot.electron.two_sz() == 0.0 || dot.A0 == 0.0;
    const int reach = static_cast<int>(std::floor(p.pair_cutoff_nm / a0));
    const int reach_broad = static_cast<int>(std::floor(p.broadening_cutoff_nm / a0));
    const std::int64_t margin = reach + reach_broad;
    const int span = 2 * reach + 1;
    // electron-free W is invariant under lateral translation; the probe layer
    // stays in the key because the slab clips the broadening box in z
    const std::size_t nlayers = std::size_t(2 * std::min<std::int64_t>(lattice.half_nz, 64) + 1);
    std::vector<double> memo(std::size_t(span) * span * span * nlayers, -1.0);
    auto memo_key = [&](int dx, int dy, int dz, std::int64_t kz) {
        const std::size_t off = (std::size_t(dz + reach) * span + std::size_t(dy + reach)) * span +
                                std::size_t(dx + reach);
        return off * nlayers + std::size_t(kz + std::int64_t(nlayers / 2));
    };
    auto pair_rate = [&](const Site& si, const Site& sk, std::int64_t kx, std::int64_t ky, std::int64_t kz,
                         int dx, int dy, int dz) {
        const bool xy_interior = std::llabs(kx) + margin <= lattice.half_nx &&
                                 std::llabs(ky) + margin <= lattice.half_ny &&
                                 std::llabs(kz) <= std::int64_t(nlayers / 2);
        if (uniform && xy_interior) {
            double& slot = memo[memo_key(dx, dy, dz, kz)];
            if (slot < 0.0) slot = flipflop_rate(si, sk, dot, lattice, p);
            return slot;
        }
        return flipflop_rate(si, sk, dot, lattice, p);
    };

    std::vector<std::vector<std::pair<std::int64_t, double>>> rows(n);
    const bool full_lattice = std::int64_t(n) == lattice.site_count();
    if (full_lattice) {
        // index arithmetic on the materialized lattice
        for (std::size_t k = 0; k < n; ++k) {
            const Site& sk = sites[k];
            const std::int64_t kx = coord(sk.x), ky = coord(sk.y), kz = coord(sk.z);
            for (int dz = -reach; dz <= reach; ++dz)
                for (int dy = -reach; dy <= reach; ++dy)
                    for (int dx = -reach; dx <= reach; ++dx) {
                        if (dx == 0 && dy == 0 && dz == 0) continue;
                        if (double(dx * dx + dy * dy + dz * dz) * a0 * a0 > cut2) continue;
                        const std::int64_t ix = kx + dx, iy = ky + dy, iz = kz + dz;
                        if (!lattice.contains(ix, iy, iz)) continue;
                        const std::int64_t i = lattice.index_of(ix, iy, iz);
                        rows[k].emplace_back(i, pair_rate(sites[i], sk, kx, ky, kz, dx, dy, dz));
                    }
        }
    } else {
        // arbitrary subset: quadratic scan (desk-scale lists only)
        for (std::size_t k = 0; k < n; ++k) {
            const Site& sk = sites[k];
            const std::int64_t kx = coord(sk.x), ky = coord(sk.y), kz = coord(sk.z);
            for (std::size_t i = 0; i < n; ++i) {
                if (i == k) continue;
                const Site& si = sites[i];
                const double ddx = si.x - sk.x, ddy = si.y - sk.y, ddz = si.z - sk.z;
                if (ddx * ddx + ddy * ddy + ddz * ddz > cut2) continue;
                rows[k].emplace_back(std::int64_t(i),
                                     pair_rate(si, sk, kx, ky, kz, int(std::llround(ddx / a0)),
                                               int(std::llround(ddy / a0)), int(std::llround(ddz / a0))));
            }
        }
    }
    for (std::size_t k = 0; k < n; ++k) net.row_ptr[k + 1] = net.row_ptr[k] + std::int64_t(rows[k].size());
    net.col.reserve(net.row_ptr[n]);
    net.w.reserve(net.row_ptr[n]);
    net.row_sum.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double rs = 0.0;
        for (auto& [i, wik] : rows[k]) {
            net.col.push_back(i);
            net.w.push_back(wik);
            rs += wik;
        }
        net.row_sum[k] = rs;
    }
    return net;
}

namespace {

// Cash-Karp embedded Runge-Kutta pair (orders 4 and 5).
constexpr double b21 = 1.0 / 5.0;
constexpr double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
constexpr double b41 = 3.0 / 10.0, b42 = -9.0 / 10.0, b43 = 6.0 / 5.0;
constexpr double b51 = -11.0 / 54.0, b52 = 5.0 / 2.0, b53 = -70.0 / 27.0, b54 = 35.0 / 27.0;
constexpr double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0, b63 = 575.0 / 13824.0,
                 b64 = 44275.0 / 110592.0, b65 = 253.0 / 4096.0;
constexpr double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0, c4 = 125.0 / 594.0, c6 = 512.0 / 1771.0;
constexpr double d1 = c1 - 2825.0 / 27648.0, d3 = c3 - 18575.0 / 48384.0, d4 = c4 - 13525.0 / 55296.0,
                 d5 = -277.0 / 14336.0, d6 = c6 - 1.0 / 4.0;

struct RKWork {
    std::vector<double> k1, k2, k3, k4, k5, k6, tmp;
};

// One Cash-Karp step from y; returns the max abs embedded error estimate.
double ck_step(const RateNetwork& net, std::vector<double>& y, double h, RKWork& w) {
    const std::size_t n = y.size();
    net.apply(y, w.k1);
    w.tmp.resize(n);
    for (std::size_t i = 0; i < n; ++i) w.tmp[i] = y[i] + h * b21 * w.k1[i];
    net.apply(w.tmp, w.k2);
    for (std::size_t i = 0; i < n; ++i) w.tmp[i] = y[i] + h * (b31 * w.k1[i] + b32 * w.k2[i]);
    net.apply(w.tmp, w.k3);
    for (std::size_t i = 0; i < n; ++i) w.tmp[i] = y[i] + h * (b41 * w.k1[i] + b42 * w.k2[i] + b43 * w.k3[i]);
    net.apply(w.tmp, w.k4);
    for (std::size_t i = 0; i < n; ++i)
        w.tmp[i] = y[i] + h * (b51 * w.k1[i] + b52 * w.k2[i] + b53 * w.k3[i] + b54 * w.k4[i]);
    net.apply(w.tmp, w.k5);
    for (std::size_t i = 0; i < n; ++i)
        w.tmp[i] = y[i] + h * (b61 * w.k1[i] + b62 * w.k2[i] + b63 * w.k3[i] + b64 * w.k4[i] + b65 * w.k5[i]);
    net.apply(w.tmp, w.k6);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = h * (d1 * w.k1[i] + d3 * w.k3[i] + d4 * w.k4[i] + d5 * w.k5[i] + d6 * w.k6[i]);
        err = std::max(err, std::abs(e));
        w.tmp[i] = y[i] + h * (c1 * w.k1[i] + c3 * w.k3[i] + c4 * w.k4[i] + c6 * w.k6[i]);
    }
    y.swap(w.tmp);
    return err;
}

NetworkTrajectory integrate_common(const RateNetwork& net, const std::vector<double>& initial, double t_end_s,
                                   const std::vector<double>& sample_times, bool adaptive, double tol_or_dt) {
    if (initial.size() != net.size()) throw std::invalid_argument("integrate_network: state size mismatch");
    NetworkTrajectory traj;
    std::vector<double> y = initial;
    RKWork work;
    traj.t_s.push_back(0.0);
    traj.states.push_back(y);

    std::vector<double> targets = sample_times;
    std::sort(targets.begin(), targets.end());
    if (targets.empty() || targets.back() < t_end_s) targets.push_back(t_end_s);

    double t = 0.0;
    double h = adaptive ? t_end_s / 1000.0 : tol_or_dt;
    for (double target : targets) {
        if (target <= t) continue;
        while (t < target - 1e-14 * t_end_s) {
            double step = std::min(h, target - t);
            if (adaptive) {
                for (;;) {
                    std::vector<double> ysave = y;
                    const double err = ck_step(net, y, step, work);
                    if (err <= tol_or_dt) {
                        t += step;
                        // grow conservatively
                        h = step * std::min(2.0, 0.9 * std::pow(tol_or_dt / std::max(err, 1e-300), 0.2));
                        break;
                    }
                    y = ysave;
                    step *= std::max(0.1, 0.9 * std::pow(tol_or_dt / err, 0.25));
                    if (step < 1e-15 * t_end_s)
                        throw std::runtime_error("integrate_network: step underflow");
                }
            } else {
                ck_step(net, y, step, work);
                t += step;
            }
        }
        t = target;
        traj.t_s.push_back(t);
        traj.states.push_back(y);
    }
    return traj;
}

} // namespace

NetworkTrajectory integrate_network(const RateNetwork& net, const std::vector<double>& initial, double t_end_s,
                                    double tol, const std::vector<double>& sample_times) {
    if (!(tol > 0.0)) throw std::invalid_argument("integrate_network: tol must be > 0");
    return integrate_common(net, initial, t_end_s, sample_times, true, tol);
}

NetworkTrajectory integrate_network_fixed(const RateNetwork& net, const std::vector<double>& initial,
                                          double t_end_s, double dt_s, const std::vector<double>& sample_times) {
    if (!(dt_s > 0.0)) throw std::invalid_argument("integrate_network_fixed: dt must be > 0");
    return integrate_common(net, initial, t_end_s, sample_times, false, dt_s);
}

double network_overhauser(const RateNetwork& net, const std::vector<double>& y, const DotModel& dot) {
    double acc = 0.0;
    for (std::size_t k = 0; k < net.size(); ++k) acc += hyperfine_coupling(net.sites[k], dot) * y[k];
    return acc;
}

} // namespace spindiff
