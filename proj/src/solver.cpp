#include "spindiff/solver.hpp"

#include "spindiff/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace spindiff {

double PolarizationField::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }
double PolarizationField::max_value() const { return *std::max_element(values.begin(), values.end()); }
double PolarizationField::min_value() const { return *std::min_element(values.begin(), values.end()); }

PolarizationField make_initial(const Mesh2D& mesh, double r0_nm, std::vector<std::string>* warnings) {
    if (!(r0_nm > 0.0)) throw std::invalid_argument("make_initial: r0 must be > 0");
    const double domain = (mesh.nx - 1) * mesh.h_nm;
    if (r0_nm > 0.25 * domain && warnings) {
        std::ostringstream os;
        os << "initial radius r0 = " << r0_nm << " nm exceeds a quarter of the domain (" << domain
           << " nm); boundary truncation will be visible";
        warnings->push_back(os.str());
    }
    PolarizationField f;
    f.mesh = mesh;
    f.values.assign(mesh.node_count(), 0.0);
    f.time_s = 0.0;
    for (int j = 1; j < mesh.ny - 1; ++j)
        for (int i = 1; i < mesh.nx - 1; ++i) {
            const double x = mesh.x(i), y = mesh.y(j);
            f.values[mesh.idx(i, j)] = std::exp(-(x * x + y * y) / (r0_nm * r0_nm));
        }
    return f;
}

double stability_dt(const DiffusionField& d) {
    const double dmax = d.max_value();
    if (dmax <= 0.0) return std::numeric_limits<double>::infinity();
    return 0.9 * d.mesh.h_nm * d.mesh.h_nm / (4.0 * dmax);
}

namespace {

// One forward-Euler step; writes `next` from `cur`. Boundary rows/cols stay 0.
void explicit_step(const Mesh2D& m, const std::vector<double>& dfield, double alpha,
                   const std::vector<double>& cur, std::vector<double>& next, bool divergence_form, int threads) {
    const int nx = m.nx;
    parallel_for_chunks(std::size_t(m.ny - 2), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t jj = lo; jj < hi; ++jj) {
            const int j = int(jj) + 1;
            const double* c = cur.data() + std::size_t(j) * nx;
            const double* up = c + nx;
            const double* dn = c - nx;
            const double* dv = dfield.data() + std::size_t(j) * nx;
            double* out = next.data() + std::size_t(j) * nx;
            if (!divergence_form) {
                for (int i = 1; i < nx - 1; ++i)
                    out[i] = c[i] + alpha * dv[i] * (c[i + 1] + c[i - 1] + up[i] + dn[i] - 4.0 * c[i]);
            } else {
                const double* dup = dv + nx;
                const double* ddn = dv - nx;
                for (int i = 1; i < nx - 1; ++i) {
                    const double de = 0.5 * (dv[i] + dv[i + 1]), dw = 0.5 * (dv[i] + dv[i - 1]);
                    const double dn2 = 0.5 * (dv[i] + dup[i]), ds = 0.5 * (dv[i] + ddn[i]);
                    out[i] = c[i] + alpha * (de * (c[i + 1] - c[i]) - dw * (c[i] - c[i - 1]) +
                                             dn2 * (up[i] - c[i]) - ds * (c[i] - dn[i]));
                }
            }
        }
    });
}

// Thomas solve for one interior line of length n with coefficients
// a_i = c_i = -r D_i, b_i = 1 + 2 r D_i, Dirichlet-zero ends.
void solve_tridiag(const double* rd, const double* rhs, double* x, double* scratch, int n) {
    // forward sweep
    double beta = 1.0 + 2.0 * rd[0];
    x[0] = rhs[0] / beta;
    for (int i = 1; i < n; ++i) {
        scratch[i] = -rd[i - 1] / beta;
        beta = 1.0 + 2.0 * rd[i] + rd[i] * scratch[i];
        x[i] = (rhs[i] + rd[i] * x[i - 1]) / beta;
    }
    for (int i = n - 2; i >= 0; --i) x[i] -= scratch[i + 1] * x[i + 1];
}

// One Peaceman-Rachford step (two half-steps), non-divergence form.
void adi_step(const Mesh2D& m, const std::vector<double>& dfield, double r, std::vector<double>& cur,
              std::vector<double>& half, int threads) {
    const int nx = m.nx, ny = m.ny;
    // half-step 1: implicit in x, explicit in y
    parallel_for_chunks(std::size_t(ny - 2), threads, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> rd(nx - 2), rhs(nx - 2), sol(nx - 2), scratch(nx - 2);
        for (std::size_t jj = lo; jj < hi; ++jj) {
            const int j = int(jj) + 1;
            const double* c = cur.data() + std::size_t(j) * nx;
            const double* up = c + nx;
            const double* dn = c - nx;
            const double* dv = dfield.data() + std::size_t(j) * nx;
            for (int i = 1; i < nx - 1; ++i) {
                rd[i - 1] = r * dv[i];
                rhs[i - 1] = c[i] + rd[i - 1] * (up[i] + dn[i] - 2.0 * c[i]);
            }
            solve_tridiag(rd.data(), rhs.data(), sol.data(), scratch.data(), nx - 2);
            double* out = half.data() + std::size_t(j) * nx;
            out[0] = out[nx - 1] = 0.0;
            for (int i = 1; i < nx - 1; ++i) out[i] = sol[i - 1];
        }
    });
    for (int i = 0; i < nx; ++i) {
        half[m.idx(i, 0)] = 0.0;
        half[m.idx(i, ny - 1)] = 0.0;
    }
    // half-step 2: implicit in y, explicit in x
    parallel_for_chunks(std::size_t(nx - 2), threads, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> rd(ny - 2), rhs(ny - 2), sol(ny - 2), scratch(ny - 2);
        for (std::size_t ii = lo; ii < hi; ++ii) {
            const int i = int(ii) + 1;
            for (int j = 1; j < ny - 1; ++j) {
                const std::size_t id = m.idx(i, j);
                const double rdv = r * dfield[id];
                rd[j - 1] = rdv;
                rhs[j - 1] = half[id] + rdv * (half[id + 1] + half[id - 1] - 2.0 * half[id]);
            }
            solve_tridiag(rd.data(), rhs.data(), sol.data(), scratch.data(), ny - 2);
            for (int j = 1; j < ny - 1; ++j) cur[m.idx(i, j)] = sol[j - 1];
        }
    });
}

} // namespace

std::vector<PolarizationField> evolve(const PolarizationField& init, const DiffusionField& d,
                                      const SolverConfig& cfg, const EvolveObserver& observer,
                                      bool divergence_form) {
    if (!(init.mesh == d.mesh)) throw std::invalid_argument("evolve: polarization and diffusion meshes differ");
    if (!(cfg.t_end_s > 0.0)) throw std::invalid_argument("evolve: t_end must be > 0");
    if (divergence_form && cfg.scheme == Scheme::adi)
        throw std::invalid_argument("evolve: divergence form is only available with the explicit scheme");

    const double dt_stable = stability_dt(d);
    double dt = cfg.dt_s;
    if (cfg.scheme == Scheme::explicit_euler) {
        if (dt <= 0.0) dt = dt_stable;
        const double hard_limit = dt_stable / 0.9; // h^2 / (4 max D)
        if (dt > hard_limit && std::isfinite(hard_limit)) {
            std::ostringstream os;
            os << "evolve: dt = " << dt << " s violates the explicit stability limit " << hard_limit << " s";
            throw std::invalid_argument(os.str());
        }
    } else {
        if (dt <= 0.0) dt = std::max(cfg.t_end_s / 2000.0, std::isfinite(dt_stable) ? dt_stable : 0.0);
    }
    dt = std::min(dt, cfg.t_end_s);
    const long long nsteps = static_cast<long long>(std::ceil(cfg.t_end_s / dt - 1e-12));
    dt = cfg.t_end_s / double(nsteps);

    // map requested snapshot times onto step indices
    std::vector<long long> snap_steps;
    for (double t : cfg.snapshot_times)
        snap_steps.push_back(std::clamp<long long>(std::llround(t / dt), 0, nsteps));
    const double sample_dt = cfg.sample_dt_s > 0.0 ? cfg.sample_dt_s : cfg.t_end_s / 512.0;
    const long long sample_every = std::max<long long>(1, std::llround(sample_dt / dt));

    const double limit = 1.01 * init.max_value();
    PolarizationField state = init;
    std::vector<double> buf(state.values.size(), 0.0);
    std::vector<PolarizationField> snaps;
    auto take_snapshots = [&](long long step) {
        for (std::size_t s = 0; s < snap_steps.size(); ++s)
            if (snap_steps[s] == step) {
                snaps.push_back(state);
                snaps.back().time_s = step * dt;
            }
    };
    if (observer) observer(state);
    take_snapshots(0);

    const double h2 = d.mesh.h_nm * d.mesh.h_nm;
    for (long long n = 1; n <= nsteps; ++n) {
        if (cfg.scheme == Scheme::explicit_euler) {
            explicit_step(d.mesh, d.values, dt / h2, state.values, buf, divergence_form, cfg.threads);
            state.values.swap(buf);
        } else {
            adi_step(d.mesh, d.values, dt / (2.0 * h2), state.values, buf, cfg.threads);
        }
        state.time_s = n * dt;
        const double amp = std::max(state.max_value(), -state.min_value());
        if (amp > limit) {
            std::ostringstream os;
            os << "evolve: instability at t = " << state.time_s << " s (step " << n << ", dt = " << dt
               << " s): max |I| = " << amp << " > " << limit;
            throw SolverInstability(os.str());
        }
        if (observer && (n % sample_every == 0 || n == nsteps)) observer(state);
        take_snapshots(n);
    }
    return snaps;
}

} // namespace spindiff
