#include "rcgrf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "rcgrf/text.hpp"

namespace rcgrf {

DriftReport drift_report(const std::vector<Vec>& states, const std::vector<Vec>& inputs,
                         double lambda, double epsilon) {
  const Index steps = static_cast<Index>(states.size());
  if (steps < 2) {
    fail(ErrorCode::kSequenceTooShort,
         "drift_report: needs at least 2 steps, got " + std::to_string(steps));
  }
  if (static_cast<Index>(inputs.size()) != steps) {
    fail(ErrorCode::kShape, "drift_report: " + std::to_string(inputs.size()) + " inputs for " +
                                std::to_string(steps) + " states");
  }
  if (lambda < 0.0) fail(ErrorCode::kParameter, "drift_report: lambda must be nonnegative");
  if (epsilon <= 0.0) fail(ErrorCode::kParameter, "drift_report: epsilon must be positive");

  DriftReport rep;
  rep.lambda = lambda;
  rep.per_step_drift.reserve(steps - 1);
  rep.per_step_input_delta.reserve(steps - 1);
  rep.drift_ratios.reserve(steps - 1);

  double sum_sq = 0.0;
  double sum_drift = 0.0;
  for (Index t = 1; t < steps; ++t) {
    const double sq = (states[t] - states[t - 1]).squaredNorm();
    const double drift = std::sqrt(sq);
    const double input_delta = (inputs[t] - inputs[t - 1]).norm();
    sum_sq += sq;
    sum_drift += drift;
    rep.per_step_drift.push_back(drift);
    rep.per_step_input_delta.push_back(input_delta);
    rep.drift_ratios.push_back(drift / (input_delta + epsilon));
  }
  const double inv = 1.0 / static_cast<double>(steps - 1);
  rep.l_rc = sum_sq * inv;
  rep.mean_drift = sum_drift * inv;
  rep.max_drift = *std::max_element(rep.per_step_drift.begin(), rep.per_step_drift.end());
  rep.algebraic_bound_rhs = std::sqrt(static_cast<double>(steps - 1) * rep.l_rc);
  if (lambda > 0.0) {
    rep.paper_bound_rhs = std::sqrt(rep.l_rc / lambda);
    rep.paper_bound_holds = rep.max_drift <= rep.paper_bound_rhs;
  } else {
    rep.paper_bound_rhs = std::numeric_limits<double>::infinity();
    rep.paper_bound_holds = true;
  }
  // Identity on the definition of l_rc; can only fire through NaN.
  if (!(rep.max_drift * rep.max_drift <= rep.algebraic_bound_rhs * rep.algebraic_bound_rhs + 1e-9)) {
    fail(ErrorCode::kData, "drift_report: algebraic drift bound violated (non-finite states?)");
  }
  return rep;
}

DriftReport drift_report(const HiddenTrajectory& traj, double lambda, double epsilon) {
  return drift_report(traj.states, traj.inputs, lambda, epsilon);
}

void write_drift_csv(const DriftReport& report, std::ostream& os) {
  os << "t,drift,input_delta,ratio\n";
  for (std::size_t i = 0; i < report.per_step_drift.size(); ++i) {
    os << (i + 2) << ',' << format_double(report.per_step_drift[i]) << ','
       << format_double(report.per_step_input_delta[i]) << ','
       << format_double(report.drift_ratios[i]) << '\n';
  }
  os << "summary," << format_double(report.mean_drift) << ',' << format_double(report.max_drift)
     << ',' << format_double(report.l_rc) << '\n';
}

void write_drift_summary(const std::vector<DriftReport>& reports, double threshold,
                         std::ostream& os) {
  if (reports.empty()) fail(ErrorCode::kParameter, "drift summary: no reports");
  double mean_drift = 0.0;
  double max_drift = 0.0;
  double mean_l_rc = 0.0;
  std::size_t held = 0;
  std::size_t drifting_steps = 0;
  std::size_t total_steps = 0;
  for (const DriftReport& r : reports) {
    mean_drift += r.mean_drift;
    max_drift = std::max(max_drift, r.max_drift);
    mean_l_rc += r.l_rc;
    if (r.paper_bound_holds) ++held;
    for (double ratio : r.drift_ratios) {
      if (ratio > threshold) ++drifting_steps;
    }
    total_steps += r.drift_ratios.size();
  }
  const double n = static_cast<double>(reports.size());
  os << "n_sequences = " << reports.size() << '\n';
  os << "mean_drift = " << format_double(mean_drift / n) << '\n';
  os << "max_drift = " << format_double(max_drift) << '\n';
  os << "mean_l_rc = " << format_double(mean_l_rc / n) << '\n';
  os << "lambda = " << format_double(reports.front().lambda) << '\n';
  os << "bound_hold_rate = " << format_double(static_cast<double>(held) / n) << '\n';
  os << "drift_ratio_threshold = " << format_double(threshold) << '\n';
  os << "drifting_step_fraction = "
     << format_double(total_steps == 0
                          ? 0.0
                          : static_cast<double>(drifting_steps) / static_cast<double>(total_steps))
     << '\n';
}

void write_drift_svg(const std::vector<DriftReport>& reports, std::ostream& os) {
  if (reports.empty()) fail(ErrorCode::kParameter, "drift svg: no reports");
  const int width = 800, height = 320, margin = 40;
  double max_val = 0.0;
  std::size_t max_len = 0;
  for (const DriftReport& r : reports) {
    max_val = std::max(max_val, r.max_drift);
    max_len = std::max(max_len, r.per_step_drift.size());
  }
  if (max_val <= 0.0) max_val = 1.0;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
     << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
     << height - margin << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"" << height - 8
     << "\" font-size=\"12\" text-anchor=\"middle\">t</text>\n";
  os << "<text x=\"12\" y=\"" << height / 2
     << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 12 " << height / 2
     << ")\">per-step drift</text>\n";
  const double plot_w = width - 2.0 * margin;
  const double plot_h = height - 2.0 * margin;
  for (std::size_t s = 0; s < reports.size(); ++s) {
    const auto& drift = reports[s].per_step_drift;
    os << "<polyline fill=\"none\" stroke=\"" << kColors[s % 8] << "\" points=\"";
    for (std::size_t i = 0; i < drift.size(); ++i) {
      const double x =
          margin + plot_w * (max_len < 2 ? 0.0 : static_cast<double>(i) / (max_len - 1));
      const double y = height - margin - plot_h * (drift[i] / max_val);
      os << format_fixed(x, 2) << ',' << format_fixed(y, 2) << ' ';
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
}

}  // namespace rcgrf
