#include "rcgrf/cells.hpp"

#include <cmath>
#include <string>

namespace rcgrf {

namespace {

// GRU gate indices
constexpr int kZ = 0, kR = 1, kN = 2;
// LSTM gate indices
constexpr int kF = 0, kI = 1, kO = 2, kG = 3;

Mat uniform_mat(Rng& rng, Index rows, Index cols, double bound) {
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-bound, bound);
  return m;
}

void check_finite_vec(const Vec& v, const char* what) {
  if (!v.allFinite()) fail(ErrorCode::kData, std::string(what) + " contains a non-finite value");
}

}  // namespace

const char* cell_kind_name(CellKind kind) { return kind == CellKind::kLstm ? "lstm" : "gru"; }

CellParams CellParams::zeros(CellKind kind, Index input_dim, Index hidden_dim,
                             Index num_classes) {
  if (input_dim < 1 || hidden_dim < 1 || num_classes < 2) {
    fail(ErrorCode::kParameter, "cell params: need d >= 1, k >= 1, C >= 2, got d=" +
                                    std::to_string(input_dim) + " k=" + std::to_string(hidden_dim) +
                                    " C=" + std::to_string(num_classes));
  }
  CellParams p;
  p.kind = kind;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.num_classes = num_classes;
  p.gates.resize(gate_count(kind));
  for (auto& g : p.gates) {
    g.w = Mat::Zero(hidden_dim, input_dim);
    g.u = Mat::Zero(hidden_dim, hidden_dim);
    g.b = Vec::Zero(hidden_dim);
  }
  p.readout_w = Mat::Zero(num_classes, hidden_dim);
  p.readout_b = Vec::Zero(num_classes);
  return p;
}

CellParams CellParams::init(CellKind kind, Index input_dim, Index hidden_dim, Index num_classes,
                            Rng rng) {
  CellParams p = zeros(kind, input_dim, hidden_dim, num_classes);
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  for (auto& g : p.gates) {
    g.w = uniform_mat(rng, hidden_dim, input_dim, bound);
    g.u = uniform_mat(rng, hidden_dim, hidden_dim, bound);
  }
  if (kind == CellKind::kLstm) p.gates[kF].b.setOnes();
  p.readout_w = uniform_mat(rng, num_classes, hidden_dim, bound);
  return p;
}

void CellParams::validate() const {
  if (static_cast<Index>(gates.size()) != gate_count(kind)) {
    fail(ErrorCode::kShape, "cell params: expected " + std::to_string(gate_count(kind)) +
                                " gate blocks, got " + std::to_string(gates.size()));
  }
  for (const auto& g : gates) {
    if (g.w.rows() != hidden_dim || g.w.cols() != input_dim || g.u.rows() != hidden_dim ||
        g.u.cols() != hidden_dim || g.b.size() != hidden_dim) {
      fail(ErrorCode::kShape, "cell params: gate block shapes inconsistent with (d, k)");
    }
    if (!g.w.allFinite() || !g.u.allFinite() || !g.b.allFinite()) {
      fail(ErrorCode::kData, "cell params: non-finite gate parameter");
    }
  }
  if (readout_w.rows() != num_classes || readout_w.cols() != hidden_dim ||
      readout_b.size() != num_classes) {
    fail(ErrorCode::kShape, "cell params: readout shapes inconsistent with (k, C)");
  }
  if (!readout_w.allFinite() || !readout_b.allFinite()) {
    fail(ErrorCode::kData, "cell params: non-finite readout parameter");
  }
}

ParamGrads ParamGrads::zeros_like(const CellParams& params) {
  ParamGrads g;
  g.gates.resize(params.gates.size());
  for (std::size_t i = 0; i < params.gates.size(); ++i) {
    g.gates[i].w = Mat::Zero(params.gates[i].w.rows(), params.gates[i].w.cols());
    g.gates[i].u = Mat::Zero(params.gates[i].u.rows(), params.gates[i].u.cols());
    g.gates[i].b = Vec::Zero(params.gates[i].b.size());
  }
  g.readout_w = Mat::Zero(params.readout_w.rows(), params.readout_w.cols());
  g.readout_b = Vec::Zero(params.readout_b.size());
  return g;
}

void ParamGrads::add(const ParamGrads& other) {
  if (other.gates.size() != gates.size()) {
    fail(ErrorCode::kShape, "param grads: gate count mismatch in add");
  }
  for (std::size_t i = 0; i < gates.size(); ++i) {
    gates[i].w += other.gates[i].w;
    gates[i].u += other.gates[i].u;
    gates[i].b += other.gates[i].b;
  }
  readout_w += other.readout_w;
  readout_b += other.readout_b;
}

void ParamGrads::scale(double factor) {
  for (auto& g : gates) {
    g.w *= factor;
    g.u *= factor;
    g.b *= factor;
  }
  readout_w *= factor;
  readout_b *= factor;
}

double ParamGrads::squared_norm() const {
  double s = 0.0;
  for (const auto& g : gates) s += g.w.squaredNorm() + g.u.squaredNorm() + g.b.squaredNorm();
  return s + readout_w.squaredNorm() + readout_b.squaredNorm();
}

HiddenTrajectory forward(const CellParams& params, const std::vector<Vec>& inputs, const Vec& h0,
                         const Vec& c0) {
  const Index d = params.input_dim;
  const Index k = params.hidden_dim;
  const Index steps = static_cast<Index>(inputs.size());
  if (steps < 1) fail(ErrorCode::kShape, "forward: need at least one input step");
  if (h0.size() != k) {
    fail(ErrorCode::kShape, "forward: h0 has length " + std::to_string(h0.size()) +
                                ", expected " + std::to_string(k));
  }
  if (params.kind == CellKind::kGru && c0.size() != 0) {
    fail(ErrorCode::kShape, "forward: GRU takes no cell state");
  }
  for (Index t = 0; t < steps; ++t) {
    if (inputs[t].size() != d) {
      fail(ErrorCode::kShape, "forward: input at step " + std::to_string(t) + " has length " +
                                  std::to_string(inputs[t].size()) + ", expected " +
                                  std::to_string(d));
    }
    check_finite_vec(inputs[t], "forward: input");
  }
  check_finite_vec(h0, "forward: h0");

  HiddenTrajectory traj;
  traj.kind = params.kind;
  traj.inputs = inputs;
  traj.h0 = h0;
  traj.states.reserve(steps);

  if (params.kind == CellKind::kGru) {
    const GateBlock& gz = params.gates[kZ];
    const GateBlock& gr = params.gates[kR];
    const GateBlock& gn = params.gates[kN];
    traj.gru.reserve(steps);
    Vec h = h0;
    for (Index t = 0; t < steps; ++t) {
      const Vec& x = inputs[t];
      GruStepCache s;
      s.z = sigmoid(gz.w * x + gz.u * h + gz.b);
      s.r = sigmoid(gr.w * x + gr.u * h + gr.b);
      s.n = tanh(gn.w * x + gn.u * (s.r.cwiseProduct(h)) + gn.b);
      Vec hn = (1.0 - s.z.array()).matrix().cwiseProduct(h) + s.z.cwiseProduct(s.n);
      traj.gru.push_back(std::move(s));
      traj.states.push_back(hn);
      h = std::move(hn);
    }
  } else {
    Vec c = c0.size() == 0 ? Vec(Vec::Zero(k)) : c0;
    if (c.size() != k) {
      fail(ErrorCode::kShape, "forward: c0 has length " + std::to_string(c.size()) +
                                  ", expected " + std::to_string(k));
    }
    check_finite_vec(c, "forward: c0");
    traj.c0 = c;
    const GateBlock& gf = params.gates[kF];
    const GateBlock& gi = params.gates[kI];
    const GateBlock& go = params.gates[kO];
    const GateBlock& gg = params.gates[kG];
    traj.lstm.reserve(steps);
    traj.cell_states.reserve(steps);
    Vec h = h0;
    for (Index t = 0; t < steps; ++t) {
      const Vec& x = inputs[t];
      LstmStepCache s;
      s.f = sigmoid(gf.w * x + gf.u * h + gf.b);
      s.i = sigmoid(gi.w * x + gi.u * h + gi.b);
      s.o = sigmoid(go.w * x + go.u * h + go.b);
      s.g = tanh(gg.w * x + gg.u * h + gg.b);
      Vec cn = s.f.cwiseProduct(c) + s.i.cwiseProduct(s.g);
      s.c_tanh = tanh(cn);
      Vec hn = s.o.cwiseProduct(s.c_tanh);
      traj.lstm.push_back(std::move(s));
      traj.cell_states.push_back(cn);
      traj.states.push_back(hn);
      h = std::move(hn);
      c = std::move(cn);
    }
  }
  return traj;
}

HiddenTrajectory forward(const CellParams& params, const std::vector<Vec>& inputs) {
  const Vec h0 = Vec::Zero(params.hidden_dim);
  if (params.kind == CellKind::kLstm) {
    return forward(params, inputs, h0, Vec::Zero(params.hidden_dim));
  }
  return forward(params, inputs, h0);
}

BackwardResult backward(const CellParams& params, const HiddenTrajectory& traj,
                        const std::vector<Vec>& upstream) {
  const Index k = params.hidden_dim;
  const Index steps = traj.steps();
  if (traj.kind != params.kind) {
    fail(ErrorCode::kShape, "backward: trajectory cell kind does not match params");
  }
  if (static_cast<Index>(upstream.size()) != steps) {
    fail(ErrorCode::kShape, "backward: got " + std::to_string(upstream.size()) +
                                " upstream gradients for " + std::to_string(steps) + " steps");
  }
  for (const Vec& u : upstream) {
    if (u.size() != k) {
      fail(ErrorCode::kShape, "backward: upstream gradient has length " +
                                  std::to_string(u.size()) + ", expected " + std::to_string(k));
    }
  }

  BackwardResult out;
  out.grads = ParamGrads::zeros_like(params);

  if (params.kind == CellKind::kGru) {
    const GateBlock& gz = params.gates[kZ];
    const GateBlock& gr = params.gates[kR];
    const GateBlock& gn = params.gates[kN];
    GateBlock& dz_blk = out.grads.gates[kZ];
    GateBlock& dr_blk = out.grads.gates[kR];
    GateBlock& dn_blk = out.grads.gates[kN];
    Vec carry = Vec::Zero(k);
    for (Index t = steps - 1; t >= 0; --t) {
      const GruStepCache& s = traj.gru[t];
      const Vec& x = traj.inputs[t];
      const Vec& hprev = t == 0 ? traj.h0 : traj.states[t - 1];
      const Vec dh = upstream[t] + carry;

      const Vec da_z =
          (dh.array() * (s.n - hprev).array() * s.z.array() * (1.0 - s.z.array())).matrix();
      const Vec da_n = (dh.array() * s.z.array() * (1.0 - s.n.array().square())).matrix();
      const Vec un_da_n = gn.u.transpose() * da_n;
      const Vec da_r =
          (un_da_n.array() * hprev.array() * s.r.array() * (1.0 - s.r.array())).matrix();

      Vec dhprev = (dh.array() * (1.0 - s.z.array())).matrix();
      dhprev += un_da_n.cwiseProduct(s.r);
      dhprev.noalias() += gz.u.transpose() * da_z;
      dhprev.noalias() += gr.u.transpose() * da_r;

      dz_blk.w.noalias() += da_z * x.transpose();
      dz_blk.u.noalias() += da_z * hprev.transpose();
      dz_blk.b += da_z;
      dr_blk.w.noalias() += da_r * x.transpose();
      dr_blk.u.noalias() += da_r * hprev.transpose();
      dr_blk.b += da_r;
      dn_blk.w.noalias() += da_n * x.transpose();
      dn_blk.u.noalias() += da_n * s.r.cwiseProduct(hprev).transpose();
      dn_blk.b += da_n;

      carry = std::move(dhprev);
    }
    out.dh0 = std::move(carry);
  } else {
    const GateBlock& gf = params.gates[kF];
    const GateBlock& gi = params.gates[kI];
    const GateBlock& go = params.gates[kO];
    const GateBlock& gg = params.gates[kG];
    Vec carry_h = Vec::Zero(k);
    Vec carry_c = Vec::Zero(k);
    for (Index t = steps - 1; t >= 0; --t) {
      const LstmStepCache& s = traj.lstm[t];
      const Vec& x = traj.inputs[t];
      const Vec& hprev = t == 0 ? traj.h0 : traj.states[t - 1];
      const Vec& cprev = t == 0 ? traj.c0 : traj.cell_states[t - 1];
      const Vec dh = upstream[t] + carry_h;

      const Vec da_o =
          (dh.array() * s.c_tanh.array() * s.o.array() * (1.0 - s.o.array())).matrix();
      const Vec dc =
          carry_c + (dh.array() * s.o.array() * (1.0 - s.c_tanh.array().square())).matrix();
      const Vec da_f = (dc.array() * cprev.array() * s.f.array() * (1.0 - s.f.array())).matrix();
      const Vec da_i = (dc.array() * s.g.array() * s.i.array() * (1.0 - s.i.array())).matrix();
      const Vec da_g = (dc.array() * s.i.array() * (1.0 - s.g.array().square())).matrix();

      Vec dhprev = gf.u.transpose() * da_f;
      dhprev.noalias() += gi.u.transpose() * da_i;
      dhprev.noalias() += go.u.transpose() * da_o;
      dhprev.noalias() += gg.u.transpose() * da_g;

      const Vec* das[4] = {&da_f, &da_i, &da_o, &da_g};
      for (int gate = 0; gate < 4; ++gate) {
        GateBlock& blk = out.grads.gates[gate];
        blk.w.noalias() += *das[gate] * x.transpose();
        blk.u.noalias() += *das[gate] * hprev.transpose();
        blk.b += *das[gate];
      }

      carry_h = std::move(dhprev);
      carry_c = dc.cwiseProduct(s.f);
    }
    out.dh0 = std::move(carry_h);
    out.dc0 = std::move(carry_c);
  }
  return out;
}

}  // namespace rcgrf
