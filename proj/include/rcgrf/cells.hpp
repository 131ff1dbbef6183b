#pragma once

#include <vector>

#include "rcgrf/core.hpp"

namespace rcgrf {

enum class CellKind { kGru, kLstm };

const char* cell_kind_name(CellKind kind);

/// One gate's parameter triple: input-to-hidden, hidden-to-hidden, bias.
struct GateBlock {
  Mat w;  // k x d
  Mat u;  // k x k
  Vec b;  // k
};

/// All learnable parameters of one gated cell plus its readout head.
///
/// Gate order is fixed and used for serialization:
///   GRU:  update (z), reset (r), candidate (n)
///   LSTM: forget (f), input (i), output (o), candidate (g)
struct CellParams {
  CellKind kind = CellKind::kGru;
  Index input_dim = 0;
  Index hidden_dim = 0;
  Index num_classes = 0;
  std::vector<GateBlock> gates;
  Mat readout_w;  // C x k
  Vec readout_b;  // C

  static Index gate_count(CellKind kind) { return kind == CellKind::kLstm ? 4 : 3; }

  /// Zeroed parameters with consistent shapes.
  static CellParams zeros(CellKind kind, Index input_dim, Index hidden_dim, Index num_classes);

  /// Weights uniform in +-1/sqrt(k); biases zero except LSTM forget
  /// biases, which start at 1.
  static CellParams init(CellKind kind, Index input_dim, Index hidden_dim, Index num_classes,
                         Rng rng);

  /// Throws on inconsistent shapes or non-finite entries.
  void validate() const;
};

struct GruStepCache {
  Vec z, r, n;
};

struct LstmStepCache {
  Vec f, i, o, g, c_tanh;
};

/// Complete forward record over one sequence: inputs, initial state,
/// hidden (and cell) states, and every gate activation, enough to run
/// backward without recomputation.
struct HiddenTrajectory {
  CellKind kind = CellKind::kGru;
  std::vector<Vec> inputs;  // x_1..x_T
  Vec h0;
  Vec c0;                        // LSTM only
  std::vector<Vec> states;       // h_1..h_T
  std::vector<Vec> cell_states;  // c_1..c_T, LSTM only
  std::vector<GruStepCache> gru;
  std::vector<LstmStepCache> lstm;

  Index steps() const { return static_cast<Index>(states.size()); }
  const Vec& last_state() const { return states.back(); }
};

/// Gradient blocks, shape-congruent with the CellParams they were
/// computed against.
struct ParamGrads {
  std::vector<GateBlock> gates;
  Mat readout_w;
  Vec readout_b;

  static ParamGrads zeros_like(const CellParams& params);

  void add(const ParamGrads& other);
  void scale(double factor);
  double squared_norm() const;
};

HiddenTrajectory forward(const CellParams& params, const std::vector<Vec>& inputs, const Vec& h0,
                         const Vec& c0 = Vec());

/// Zero initial state, the classifier convention.
HiddenTrajectory forward(const CellParams& params, const std::vector<Vec>& inputs);

struct BackwardResult {
  ParamGrads grads;
  Vec dh0;
  Vec dc0;  // LSTM only
};

/// Exact BPTT gradient of the loss  sum_t <upstream[t], h_t>  with
/// respect to every cell parameter and the initial state. Upstream
/// gradients are injected per step, so losses touching every h_t (not
/// just the last) are supported. Readout blocks come back zeroed; the
/// head is not part of the recurrence.
BackwardResult backward(const CellParams& params, const HiddenTrajectory& traj,
                        const std::vector<Vec>& upstream);

}  // namespace rcgrf
