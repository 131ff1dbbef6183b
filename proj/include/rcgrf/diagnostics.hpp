#pragma once

#include <iosfwd>
#include <vector>

#include "rcgrf/cells.hpp"

namespace rcgrf {

/// Drift and stability measurements for one trajectory. The sqrt(l_rc /
/// lambda) bound is recorded with a boolean, never enforced; the
/// algebraic surrogate max drift^2 <= (T-1) * l_rc holds identically and
/// is checked on construction.
struct DriftReport {
  std::vector<double> per_step_drift;        // ||h_t - h_{t-1}||, T-1 entries
  std::vector<double> per_step_input_delta;  // ||x_t - x_{t-1}||, T-1 entries
  std::vector<double> drift_ratios;          // drift / (input delta + epsilon)
  double mean_drift = 0.0;
  double max_drift = 0.0;
  double l_rc = 0.0;
  double lambda = 0.0;
  double paper_bound_rhs = 0.0;  // +inf when lambda = 0
  bool paper_bound_holds = true;
  double algebraic_bound_rhs = 0.0;  // sqrt((T-1) * l_rc)

  Index steps() const { return static_cast<Index>(per_step_drift.size()) + 1; }
};

DriftReport drift_report(const std::vector<Vec>& states, const std::vector<Vec>& inputs,
                         double lambda, double epsilon = 1e-8);
DriftReport drift_report(const HiddenTrajectory& traj, double lambda, double epsilon = 1e-8);

/// One row per step (t, drift, input_delta, ratio) plus a summary row
/// (literal "summary", mean drift, max drift, l_rc).
void write_drift_csv(const DriftReport& report, std::ostream& os);

/// Aggregate over many sequences: drift statistics, the recorded-bound
/// hold rate, and the fraction of steps whose ratio exceeds `threshold`.
void write_drift_summary(const std::vector<DriftReport>& reports, double threshold,
                         std::ostream& os);

/// Minimal line chart of per-step drift for the given reports.
void write_drift_svg(const std::vector<DriftReport>& reports, std::ostream& os);

}  // namespace rcgrf
