#include "rcgrf/objective.hpp"

#include <cmath>
#include <string>

namespace rcgrf {

std::pair<double, Vec> cross_entropy(const Vec& logits, Index label) {
  const Index c = logits.size();
  if (label < 0 || label >= c) {
    fail(ErrorCode::kParameter, "cross_entropy: label " + std::to_string(label) +
                                    " out of range [0, " + std::to_string(c) + ")");
  }
  const double m = logits.maxCoeff();
  const Vec ex = (logits.array() - m).exp().matrix();
  const double sum = ex.sum();
  const double loss = m + std::log(sum) - logits[label];
  Vec dlogits = ex / sum;
  dlogits[label] -= 1.0;
  return {loss, std::move(dlogits)};
}

Vec readout_logits(const CellParams& params, const Vec& h) {
  return matvec(params.readout_w, h) + params.readout_b;
}

RcLossResult rc_loss(const std::vector<Vec>& states) {
  const Index steps = static_cast<Index>(states.size());
  if (steps < 2) {
    fail(ErrorCode::kSequenceTooShort,
         "rc_loss: needs at least 2 steps, got " + std::to_string(steps));
  }
  const Index k = states.front().size();
  const double inv = 1.0 / static_cast<double>(steps - 1);
  RcLossResult out;
  out.dh.assign(steps, Vec::Zero(k));
  double sum_sq = 0.0;
  for (Index t = 1; t < steps; ++t) {
    if (states[t].size() != k) {
      fail(ErrorCode::kShape, "rc_loss: state length changes at step " + std::to_string(t));
    }
    const Vec diff = states[t] - states[t - 1];
    sum_sq += diff.squaredNorm();
    out.dh[t] += 2.0 * inv * diff;
    out.dh[t - 1] -= 2.0 * inv * diff;
  }
  out.value = sum_sq * inv;
  return out;
}

RcLossResult rc_loss(const HiddenTrajectory& traj) { return rc_loss(traj.states); }

TotalLossResult total_loss(const CellParams& params, const SequenceSample& sample,
                           double lambda) {
  if (lambda < 0.0) {
    fail(ErrorCode::kParameter, "total_loss: lambda must be nonnegative, got " +
                                    std::to_string(lambda));
  }
  if (sample.steps() < 2) {
    fail(ErrorCode::kSequenceTooShort, "total_loss: sequence has " +
                                           std::to_string(sample.steps()) +
                                           " steps, need at least 2");
  }
  const HiddenTrajectory traj = forward(params, sample.inputs);
  const Index steps = traj.steps();

  const Vec logits = readout_logits(params, traj.last_state());
  auto [l_cls, dlogits] = cross_entropy(logits, sample.label);
  const RcLossResult rc = rc_loss(traj.states);

  std::vector<Vec> upstream;
  if (lambda != 0.0) {
    upstream = rc.dh;
    for (Vec& u : upstream) u *= lambda;
  } else {
    upstream.assign(steps, Vec::Zero(params.hidden_dim));
  }
  upstream[steps - 1].noalias() += params.readout_w.transpose() * dlogits;

  BackwardResult back = backward(params, traj, upstream);
  back.grads.readout_w.noalias() = dlogits * traj.last_state().transpose();
  back.grads.readout_b = dlogits;

  return TotalLossResult{make_breakdown(l_cls, rc.value, lambda), std::move(back.grads)};
}

}  // namespace rcgrf
