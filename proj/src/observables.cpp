#include "spindiff/observables.hpp"

#include <cmath>
#include <stdexcept>

namespace spindiff {

double overhauser(const PolarizationField& field, const DotModel& dot) {
    const Mesh2D& m = field.mesh;
    double sum = 0.0;
    for (int j = 0; j < m.ny; ++j) {
        const double y = m.y(j);
        for (int i = 0; i < m.nx; ++i) {
            const double x = m.x(i);
            const double w = std::exp(-(x * x + y * y) / (dot.l0_nm * dot.l0_nm));
            sum += w * field.values[m.idx(i, j)];
        }
    }
    return dot.A0 * sum;
}

double analytic_decay(double t_s, double d_nm2_s, double r0_nm, double l0_nm) {
    const double s0 = r0_nm * r0_nm + l0_nm * l0_nm;
    return s0 / (s0 + 4.0 * d_nm2_s * t_s);
}

double half_decay_time(const DecayCurve& curve) {
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (curve.h[i] <= 0.5) {
            const double h0 = curve.h[i - 1], h1 = curve.h[i];
            const double t0 = curve.t_s[i - 1], t1 = curve.t_s[i];
            if (h0 == h1) return t1;
            return t0 + (0.5 - h0) * (t1 - t0) / (h1 - h0);
        }
    }
    throw std::runtime_error("half_decay_time: insufficient horizon (curve never reaches 0.5)");
}

FitResult fit_deff(const DecayCurve& curve, const DotModel& dot) {
    if (curve.size() < 10) throw std::invalid_argument("fit_deff: need at least 10 samples");
    double hmin = curve.h.front();
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (curve.h[i] > curve.h[i - 1] + 1e-9)
            throw std::invalid_argument("fit_deff: curve is not monotone");
        hmin = std::min(hmin, curve.h[i]);
    }
    if (hmin > 0.9) throw std::invalid_argument("fit_deff: curve does not decay");

    const double r0 = curve.r0_nm > 0.0 ? curve.r0_nm : dot.l0_nm;
    auto rms = [&](double d) {
        double acc = 0.0;
        for (std::size_t i = 0; i < curve.size(); ++i) {
            const double e = analytic_decay(curve.t_s[i], d, r0, dot.l0_nm) - curve.h[i];
            acc += e * e;
        }
        return std::sqrt(acc / double(curve.size()));
    };

    // golden-section search on log10 D in [-3, 3]
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = -3.0, hi = 3.0;
    for (int it = 0; it < 100; ++it) {
        const double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
        if (rms(std::pow(10.0, c)) < rms(std::pow(10.0, d)))
            hi = d;
        else
            lo = c;
    }
    FitResult r;
    r.d_eff = std::pow(10.0, 0.5 * (lo + hi));
    r.rms_residual = rms(r.d_eff);
    r.window_t0_s = curve.t_s.front();
    r.window_t1_s = curve.t_s.back();
    return r;
}

} // namespace spindiff
