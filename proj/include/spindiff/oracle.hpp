#pragma once

#include "spindiff/model.hpp"
#include "spindiff/rates.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace spindiff {

/// Sparse symmetric rate matrix over a materialized site list (CSR layout,
/// zero diagonal), plus the geometry it was built from. The discrete master
/// equation d<I_k>/dt = sum_i W_ik (<I_i> - <I_k>) integrated on this
/// network is the ground truth the coarse-grained PDE is checked against.
struct RateNetwork {
    std::vector<Site> sites;
    std::vector<std::int64_t> row_ptr;
    std::vector<std::int64_t> col;
    std::vector<double> w;          // rad/s
    std::vector<double> row_sum;    // sum_i W_ik per row

    std::size_t size() const { return sites.size(); }
    /// dy = W y - diag(row_sum) y
    void apply(const std::vector<double>& y, std::vector<double>& dy) const;
};

/// All pairs within the pair cutoff, deterministic order. Throws when the
/// site count exceeds `site_cap` (default 5e4: the ODE system is dense in
/// time, this is a desk-scale oracle, not a production path).
RateNetwork build_network(const std::vector<Site>& sites, const DotModel& dot, const LatticeSpec& lattice,
                          const RateParams& p, std::int64_t site_cap = 50'000);

struct NetworkTrajectory {
    std::vector<double> t_s;
    std::vector<std::vector<double>> states; // one state vector per sample time
};

/// Adaptive embedded Runge-Kutta (Cash-Karp 4/5) integration of the rate
/// network to t_end, sampling the state at `sample_times` (which must be
/// ascending; t = 0 is always included). `tol` controls the per-step
/// absolute error. Throws on step underflow.
NetworkTrajectory integrate_network(const RateNetwork& net, const std::vector<double>& initial,
                                    double t_end_s, double tol, const std::vector<double>& sample_times);

/// Fixed-step RK4 fallback (reproducibility reference).
NetworkTrajectory integrate_network_fixed(const RateNetwork& net, const std::vector<double>& initial,
                                          double t_end_s, double dt_s, const std::vector<double>& sample_times);

/// Overhauser sum over network sites: sum_k A_k y_k.
double network_overhauser(const RateNetwork& net, const std::vector<double>& y, const DotModel& dot);

} // namespace spindiff
