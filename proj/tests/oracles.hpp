// Test-only reference implementations, deliberately written as plain
// scalar loops with no shared code paths into the library: a per-step
// cell recurrence, central finite differences, a label-list metrics
// computation, and a hand-unrolled Adam recursion.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "rcgrf/cells.hpp"

namespace oracles {

inline double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// ---------------------------------------------------------------------------
// Scalar step-by-step recurrences (independent of rcgrf::forward).

inline std::vector<std::vector<double>> scalar_gru_forward(const rcgrf::CellParams& p,
                                                           const std::vector<rcgrf::Vec>& xs,
                                                           const rcgrf::Vec& h0) {
  const long d = p.input_dim, k = p.hidden_dim;
  std::vector<double> h(static_cast<std::size_t>(k));
  for (long i = 0; i < k; ++i) h[static_cast<std::size_t>(i)] = h0[i];
  std::vector<std::vector<double>> states;
  for (const rcgrf::Vec& x : xs) {
    std::vector<double> z(k), r(k), n(k), hn(k);
    for (long i = 0; i < k; ++i) {
      double az = p.gates[0].b[i], ar = p.gates[1].b[i];
      for (long j = 0; j < d; ++j) {
        az += p.gates[0].w(i, j) * x[j];
        ar += p.gates[1].w(i, j) * x[j];
      }
      for (long j = 0; j < k; ++j) {
        az += p.gates[0].u(i, j) * h[static_cast<std::size_t>(j)];
        ar += p.gates[1].u(i, j) * h[static_cast<std::size_t>(j)];
      }
      z[static_cast<std::size_t>(i)] = sig(az);
      r[static_cast<std::size_t>(i)] = sig(ar);
    }
    for (long i = 0; i < k; ++i) {
      double an = p.gates[2].b[i];
      for (long j = 0; j < d; ++j) an += p.gates[2].w(i, j) * x[j];
      for (long j = 0; j < k; ++j) {
        an += p.gates[2].u(i, j) * r[static_cast<std::size_t>(j)] * h[static_cast<std::size_t>(j)];
      }
      n[static_cast<std::size_t>(i)] = std::tanh(an);
    }
    for (long i = 0; i < k; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      hn[ii] = (1.0 - z[ii]) * h[ii] + z[ii] * n[ii];
    }
    states.push_back(hn);
    h = hn;
  }
  return states;
}

inline std::vector<std::vector<double>> scalar_lstm_forward(const rcgrf::CellParams& p,
                                                            const std::vector<rcgrf::Vec>& xs,
                                                            const rcgrf::Vec& h0,
                                                            const rcgrf::Vec& c0) {
  const long d = p.input_dim, k = p.hidden_dim;
  std::vector<double> h(static_cast<std::size_t>(k)), c(static_cast<std::size_t>(k));
  for (long i = 0; i < k; ++i) {
    h[static_cast<std::size_t>(i)] = h0[i];
    c[static_cast<std::size_t>(i)] = c0[i];
  }
  std::vector<std::vector<double>> states;
  for (const rcgrf::Vec& x : xs) {
    std::vector<double> hn(static_cast<std::size_t>(k)), cn(static_cast<std::size_t>(k));
    for (long i = 0; i < k; ++i) {
      double a[4];
      for (int gate = 0; gate < 4; ++gate) {
        a[gate] = p.gates[static_cast<std::size_t>(gate)].b[i];
        for (long j = 0; j < d; ++j) a[gate] += p.gates[static_cast<std::size_t>(gate)].w(i, j) * x[j];
        for (long j = 0; j < k; ++j) {
          a[gate] += p.gates[static_cast<std::size_t>(gate)].u(i, j) * h[static_cast<std::size_t>(j)];
        }
      }
      const double f = sig(a[0]), in = sig(a[1]), o = sig(a[2]), g = std::tanh(a[3]);
      const auto ii = static_cast<std::size_t>(i);
      cn[ii] = f * c[ii] + in * g;
      hn[ii] = o * std::tanh(cn[ii]);
    }
    // states only; the loop above reads h from the previous step, so
    // commit h/c after the whole step
    states.push_back(hn);
    h = hn;
    c = cn;
  }
  return states;
}

// ---------------------------------------------------------------------------
// Finite differences over parameter coordinates.

// Declaration-order flattening of every learnable coordinate.
inline std::vector<double*> param_coords(rcgrf::CellParams& p) {
  std::vector<double*> out;
  for (auto& g : p.gates) {
    for (long i = 0; i < g.w.size(); ++i) out.push_back(g.w.data() + i);
    for (long i = 0; i < g.u.size(); ++i) out.push_back(g.u.data() + i);
    for (long i = 0; i < g.b.size(); ++i) out.push_back(g.b.data() + i);
  }
  for (long i = 0; i < p.readout_w.size(); ++i) out.push_back(p.readout_w.data() + i);
  for (long i = 0; i < p.readout_b.size(); ++i) out.push_back(p.readout_b.data() + i);
  return out;
}

inline std::vector<double> grad_coords(const rcgrf::ParamGrads& g) {
  std::vector<double> out;
  for (const auto& blk : g.gates) {
    for (long i = 0; i < blk.w.size(); ++i) out.push_back(blk.w.data()[i]);
    for (long i = 0; i < blk.u.size(); ++i) out.push_back(blk.u.data()[i]);
    for (long i = 0; i < blk.b.size(); ++i) out.push_back(blk.b.data()[i]);
  }
  for (long i = 0; i < g.readout_w.size(); ++i) out.push_back(g.readout_w.data()[i]);
  for (long i = 0; i < g.readout_b.size(); ++i) out.push_back(g.readout_b.data()[i]);
  return out;
}

struct FdCheck {
  std::size_t checked = 0;
  std::size_t failed = 0;
  double worst_abs_diff = 0.0;
};

// Central differences of `loss_fn` against `analytic`, coordinate by
// coordinate: |a - n| <= max(abs_tol, rel_tol * max(|a|, |n|)).
inline FdCheck finite_diff_check(rcgrf::CellParams& params, const std::vector<double>& analytic,
                                 const std::function<double()>& loss_fn, double step = 1e-5,
                                 double rel_tol = 1e-4, double abs_tol = 1e-7) {
  FdCheck result;
  const auto coords = param_coords(params);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const double saved = *coords[i];
    *coords[i] = saved + step;
    const double f_plus = loss_fn();
    *coords[i] = saved - step;
    const double f_minus = loss_fn();
    *coords[i] = saved;
    const double numeric = (f_plus - f_minus) / (2.0 * step);
    const double a = analytic[i];
    const double diff = std::abs(a - numeric);
    const double allowed = std::max(abs_tol, rel_tol * std::max(std::abs(a), std::abs(numeric)));
    ++result.checked;
    if (diff > allowed) ++result.failed;
    result.worst_abs_diff = std::max(result.worst_abs_diff, diff);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Metrics recomputed from raw label lists (never touches a matrix).

struct BruteMetrics {
  double accuracy = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double f1_macro = 0.0;
};

inline BruteMetrics brute_metrics(const std::vector<int>& truth, const std::vector<int>& pred,
                                  int num_classes) {
  BruteMetrics out;
  int correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == pred[i]) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  for (int c = 0; c < num_classes; ++c) {
    int tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (pred[i] == c && truth[i] == c) ++tp;
      if (pred[i] == c && truth[i] != c) ++fp;
      if (pred[i] != c && truth[i] == c) ++fn;
    }
    const double precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    const double f1 = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    out.precision_macro += precision;
    out.recall_macro += recall;
    out.f1_macro += f1;
  }
  out.precision_macro /= num_classes;
  out.recall_macro /= num_classes;
  out.f1_macro /= num_classes;
  return out;
}

// ---------------------------------------------------------------------------
// Two explicit bias-corrected Adam steps with a constant gradient.

inline std::vector<double> adam_two_steps(std::vector<double> p, const std::vector<double>& g,
                                          double lr, double b1, double b2, double eps) {
  const std::size_t n = p.size();
  std::vector<double> m(n, 0.0), v(n, 0.0);
  for (int t = 1; t <= 2; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double mhat = m[i] / (1.0 - std::pow(b1, t));
      const double vhat = v[i] / (1.0 - std::pow(b2, t));
      p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
  return p;
}

}  // namespace oracles
