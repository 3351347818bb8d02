#pragma once

#include "spindiff/model.hpp"
#include "spindiff/solver.hpp"

#include <string>
#include <vector>

namespace spindiff {

/// Normalized Overhauser decay h_z(t)/h_z(0).
struct DecayCurve {
    std::vector<double> t_s;
    std::vector<double> h;     // h[0] == 1 after normalization
    std::string scenario_id;
    double r0_nm = 0.0;        // initial Gaussian radius the curve was produced with

    std::size_t size() const { return t_s.size(); }
};

struct FitResult {
    double d_eff = 0.0;        // nm^2/s
    double rms_residual = 0.0;
    double window_t0_s = 0.0, window_t1_s = 0.0;
};

/// Discrete Overhauser field sum_nodes A(x, y, 0) I(x, y) (times the constant
/// cell weight, which cancels under normalization). Dimensionless after the
/// caller divides by the t = 0 value.
double overhauser(const PolarizationField& field, const DotModel& dot);

/// Closed-form normalized decay for constant D and a Gaussian initial state
/// of radius r0 weighted by the l0 hyperfine envelope:
///   h(t) = (r0^2 + l0^2) / (r0^2 + l0^2 + 4 D t).
double analytic_decay(double t_s, double d_nm2_s, double r0_nm, double l0_nm);

/// First crossing of h = 0.5, linearly interpolated between samples. Throws
/// ("insufficient horizon") when the curve never reaches 0.5.
double half_decay_time(const DecayCurve& curve);

/// Least-squares constant-D fit of the curve against analytic_decay, scalar
/// golden-section search on log D over [1e-3, 1e3] nm^2/s. Throws on curves
/// that do not decay or are not monotone (beyond rounding noise).
FitResult fit_deff(const DecayCurve& curve, const DotModel& dot);

/// Build a normalized curve by sampling a solver run: helper used by the
/// scenario driver and tests.
class DecayRecorder {
  public:
    DecayRecorder(const DotModel& dot, std::string scenario_id, double r0_nm)
        : dot_(dot) {
        curve_.scenario_id = std::move(scenario_id);
        curve_.r0_nm = r0_nm;
    }
    void operator()(const PolarizationField& f) {
        const double v = overhauser(f, dot_);
        if (curve_.t_s.empty()) norm_ = v;
        curve_.t_s.push_back(f.time_s);
        curve_.h.push_back(norm_ != 0.0 ? v / norm_ : 0.0);
    }
    const DecayCurve& curve() const { return curve_; }

  private:
    DotModel dot_;
    DecayCurve curve_;
    double norm_ = 1.0;
};

} // namespace spindiff
