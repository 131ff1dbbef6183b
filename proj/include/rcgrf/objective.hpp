#pragma once

#include <utility>
#include <vector>

#include "rcgrf/cells.hpp"
#include "rcgrf/data.hpp"

namespace rcgrf {

/// Per-batch (or per-sample) loss decomposition; total is always
/// l_cls + lambda * l_rc by construction.
struct LossBreakdown {
  double l_cls = 0.0;
  double l_rc = 0.0;
  double lambda = 0.0;
  double total = 0.0;
};

inline LossBreakdown make_breakdown(double l_cls, double l_rc, double lambda) {
  return LossBreakdown{l_cls, l_rc, lambda, l_cls + lambda * l_rc};
}

/// Numerically stable softmax cross-entropy; gradient is
/// softmax(logits) - onehot(label).
std::pair<double, Vec> cross_entropy(const Vec& logits, Index label);

/// Classification head: logits = V h + c. The classifier reads h_T only.
Vec readout_logits(const CellParams& params, const Vec& h);

struct RcLossResult {
  double value = 0.0;       // mean squared step difference
  std::vector<Vec> dh;      // gradient w.r.t. each h_t as a free variable
};

/// Consistency loss over hidden states: mean over t = 2..T of
/// ||h_t - h_{t-1}||^2. Gradients treat the states as free variables;
/// chaining through the recurrence is backward's job.
RcLossResult rc_loss(const std::vector<Vec>& states);
RcLossResult rc_loss(const HiddenTrajectory& traj);

struct TotalLossResult {
  LossBreakdown breakdown;
  ParamGrads grads;
};

/// Combined objective l_cls + lambda * l_rc on one sample, with the
/// exact parameter gradient routed through BPTT. lambda = 0 skips the
/// consistency injection entirely so the result matches an
/// unregularized run bit for bit.
TotalLossResult total_loss(const CellParams& params, const SequenceSample& sample, double lambda);

}  // namespace rcgrf
