#include "rcgrf/train.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "rcgrf/diagnostics.hpp"
#include "rcgrf/metrics.hpp"
#include "rcgrf/text.hpp"

namespace rcgrf {

namespace {

constexpr std::uint64_t kInitStream = 1001;
constexpr std::uint64_t kShuffleStreamBase = 2000;

template <typename Block>
void adam_update_block(Block& p, const Block& g, Block& m, Block& v, double lr, double beta1,
                       double beta2, double eps, double bc1, double bc2) {
  m.array() = beta1 * m.array() + (1.0 - beta1) * g.array();
  v.array() = beta2 * v.array() + (1.0 - beta2) * g.array().square();
  p.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
}

void check_congruent(const CellParams& params, const ParamGrads& grads) {
  if (grads.gates.size() != params.gates.size() ||
      grads.readout_w.rows() != params.readout_w.rows() ||
      grads.readout_w.cols() != params.readout_w.cols() ||
      grads.readout_b.size() != params.readout_b.size()) {
    fail(ErrorCode::kShape, "adam_step: gradient blocks not congruent with params");
  }
  for (std::size_t i = 0; i < params.gates.size(); ++i) {
    if (grads.gates[i].w.rows() != params.gates[i].w.rows() ||
        grads.gates[i].w.cols() != params.gates[i].w.cols() ||
        grads.gates[i].u.rows() != params.gates[i].u.rows() ||
        grads.gates[i].u.cols() != params.gates[i].u.cols() ||
        grads.gates[i].b.size() != params.gates[i].b.size()) {
      fail(ErrorCode::kShape, "adam_step: gate gradient shapes not congruent with params");
    }
  }
}

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace

void TrainConfig::validate() const {
  if (learning_rate <= 0.0) fail(ErrorCode::kParameter, "train config: learning_rate must be > 0");
  if (batch_size < 1) fail(ErrorCode::kParameter, "train config: batch_size must be >= 1");
  if (lambda < 0.0) fail(ErrorCode::kParameter, "train config: lambda must be >= 0");
  if (hidden_dim < 1) fail(ErrorCode::kParameter, "train config: hidden_dim must be >= 1");
  if (max_epochs < 1) fail(ErrorCode::kParameter, "train config: max_epochs must be >= 1");
  if (patience < 1) fail(ErrorCode::kParameter, "train config: patience must be >= 1");
  if (adam_beta1 <= 0.0 || adam_beta1 >= 1.0 || adam_beta2 <= 0.0 || adam_beta2 >= 1.0) {
    fail(ErrorCode::kParameter, "train config: betas must lie in (0, 1)");
  }
  if (adam_epsilon <= 0.0) fail(ErrorCode::kParameter, "train config: adam_epsilon must be > 0");
  if (grad_clip_norm < 0.0) fail(ErrorCode::kParameter, "train config: grad_clip_norm must be >= 0");
}

AdamState AdamState::zeros_like(const CellParams& params) {
  AdamState s;
  s.m = ParamGrads::zeros_like(params);
  s.v = ParamGrads::zeros_like(params);
  return s;
}

void adam_step(CellParams& params, const ParamGrads& grads, AdamState& state,
               const TrainConfig& config) {
  check_congruent(params, grads);
  state.step += 1;
  const double bc1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.gates.size(); ++i) {
    adam_update_block(params.gates[i].w, grads.gates[i].w, state.m.gates[i].w, state.v.gates[i].w,
                      config.learning_rate, config.adam_beta1, config.adam_beta2,
                      config.adam_epsilon, bc1, bc2);
    adam_update_block(params.gates[i].u, grads.gates[i].u, state.m.gates[i].u, state.v.gates[i].u,
                      config.learning_rate, config.adam_beta1, config.adam_beta2,
                      config.adam_epsilon, bc1, bc2);
    adam_update_block(params.gates[i].b, grads.gates[i].b, state.m.gates[i].b, state.v.gates[i].b,
                      config.learning_rate, config.adam_beta1, config.adam_beta2,
                      config.adam_epsilon, bc1, bc2);
  }
  adam_update_block(params.readout_w, grads.readout_w, state.m.readout_w, state.v.readout_w,
                    config.learning_rate, config.adam_beta1, config.adam_beta2,
                    config.adam_epsilon, bc1, bc2);
  adam_update_block(params.readout_b, grads.readout_b, state.m.readout_b, state.v.readout_b,
                    config.learning_rate, config.adam_beta1, config.adam_beta2,
                    config.adam_epsilon, bc1, bc2);
}

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLstm: return "lstm";
    case ModelKind::kGru: return "gru";
    case ModelKind::kRcGru: return "rcgru";
  }
  return "unknown";
}

std::optional<ModelKind> model_kind_from_name(const std::string& name) {
  if (name == "lstm") return ModelKind::kLstm;
  if (name == "gru") return ModelKind::kGru;
  if (name == "rcgru") return ModelKind::kRcGru;
  return std::nullopt;
}

EvalStats evaluate_loss(const CellParams& params, const Dataset& data, double lambda) {
  if (data.samples.empty()) fail(ErrorCode::kData, "evaluate_loss: empty dataset");
  double sum_cls = 0.0, sum_rc = 0.0, sum_drift = 0.0;
  long correct = 0;
  for (const SequenceSample& s : data.samples) {
    const HiddenTrajectory traj = forward(params, s.inputs);
    const Vec logits = readout_logits(params, traj.last_state());
    sum_cls += cross_entropy(logits, s.label).first;
    sum_rc += rc_loss(traj.states).value;
    sum_drift += drift_report(traj.states, s.inputs, lambda).mean_drift;
    Index pred = 0;
    for (Index c = 1; c < logits.size(); ++c) {
      if (logits[c] > logits[pred]) pred = c;
    }
    if (pred == s.label) ++correct;
  }
  const double n = static_cast<double>(data.samples.size());
  EvalStats out;
  out.loss = make_breakdown(sum_cls / n, sum_rc / n, lambda);
  out.accuracy = static_cast<double>(correct) / n;
  out.mean_drift = sum_drift / n;
  return out;
}

TrainResult train(ModelKind kind, const Dataset& train_data, const Dataset& val_data,
                  const TrainConfig& config) {
  config.validate();
  if (train_data.samples.empty() || val_data.samples.empty()) {
    fail(ErrorCode::kData, "train: train and val splits must be nonempty");
  }
  if (train_data.input_dim != val_data.input_dim) {
    fail(ErrorCode::kShape, "train: train/val input dims differ");
  }

  const CellKind cell = kind == ModelKind::kLstm ? CellKind::kLstm : CellKind::kGru;
  const double lambda = kind == ModelKind::kRcGru ? config.lambda : 0.0;
  const Index num_classes = std::max(train_data.num_classes, val_data.num_classes);

  const Rng root(config.seed);
  CellParams params = CellParams::init(cell, train_data.input_dim, config.hidden_dim, num_classes,
                                       root.split(kInitStream));
  AdamState adam = AdamState::zeros_like(params);

  TrainLog log;
  CellParams best_params = params;
  double best_val = std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  int epochs_since_improvement = 0;
  const std::size_t n = train_data.samples.size();

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto order =
        shuffled_indices(n, root.split(kShuffleStreamBase + static_cast<std::uint64_t>(epoch)));

    double epoch_cls = 0.0, epoch_rc = 0.0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(config.batch_size));
      const double inv_batch = 1.0 / static_cast<double>(stop - start);

      ParamGrads batch_grads = ParamGrads::zeros_like(params);
      double batch_cls = 0.0, batch_rc = 0.0;
      for (std::size_t i = start; i < stop; ++i) {
        const TotalLossResult r = total_loss(params, train_data.samples[order[i]], lambda);
        batch_grads.add(r.grads);
        batch_cls += r.breakdown.l_cls;
        batch_rc += r.breakdown.l_rc;
      }
      batch_grads.scale(inv_batch);
      batch_cls *= inv_batch;
      batch_rc *= inv_batch;
      epoch_cls += batch_cls * static_cast<double>(stop - start);
      epoch_rc += batch_rc * static_cast<double>(stop - start);

      if (!std::isfinite(batch_cls + lambda * batch_rc)) {
        fail(ErrorCode::kTrainingDiverged,
             "train: non-finite batch loss at epoch " + std::to_string(epoch));
      }
      if (config.grad_clip_norm > 0.0) {
        const double norm = std::sqrt(batch_grads.squared_norm());
        if (norm > config.grad_clip_norm) batch_grads.scale(config.grad_clip_norm / norm);
      }
      adam_step(params, batch_grads, adam, config);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = make_breakdown(epoch_cls / static_cast<double>(n),
                                    epoch_rc / static_cast<double>(n), lambda);
    const EvalStats val = evaluate_loss(params, val_data, lambda);
    rec.val_loss = val.loss;
    rec.val_accuracy = val.accuracy;
    rec.val_mean_drift = val.mean_drift;
    log.epochs.push_back(rec);

    if (!std::isfinite(rec.val_loss.total)) {
      fail(ErrorCode::kTrainingDiverged,
           "train: non-finite validation loss at epoch " + std::to_string(epoch));
    }

    if (rec.val_loss.total < best_val) {
      best_val = rec.val_loss.total;
      best_epoch = epoch;
      best_params = params;
      epochs_since_improvement = 0;
    } else {
      ++epochs_since_improvement;
    }
    if (epochs_since_improvement >= config.patience) {
      log.stop_reason = "early_stop";
      break;
    }
  }
  if (log.stop_reason.empty()) log.stop_reason = "max_epochs";
  log.best_epoch = best_epoch;
  return TrainResult{std::move(best_params), std::move(log)};
}

SweepResult lambda_sweep(const Dataset& train_data, const Dataset& val_data,
                         const TrainConfig& config, const std::vector<double>& grid) {
  if (grid.empty()) fail(ErrorCode::kParameter, "lambda_sweep: empty grid");
  std::vector<double> lambdas = grid;
  std::sort(lambdas.begin(), lambdas.end());
  for (double l : lambdas) {
    if (l < 0.0) fail(ErrorCode::kParameter, "lambda_sweep: lambda must be >= 0");
  }

  SweepResult out;
  out.runs.reserve(lambdas.size());
  for (double l : lambdas) {
    TrainConfig c = config;
    c.lambda = l;
    SweepRun run;
    run.lambda = l;
    run.result = train(ModelKind::kRcGru, train_data, val_data, c);
    run.best_val_loss =
        run.result.log.epochs[static_cast<std::size_t>(run.result.log.best_epoch - 1)]
            .val_loss.total;
    out.runs.push_back(std::move(run));
  }
  out.selected = 0;
  for (std::size_t i = 1; i < out.runs.size(); ++i) {
    if (out.runs[i].best_val_loss < out.runs[out.selected].best_val_loss) out.selected = i;
  }
  return out;
}

void write_train_log_csv(const TrainLog& log, std::ostream& os) {
  os << "epoch,train_l_cls,train_l_rc,train_total,val_l_cls,val_l_rc,val_total,"
        "val_accuracy,val_mean_drift\n";
  for (const EpochRecord& r : log.epochs) {
    os << r.epoch << ',' << format_double(r.train_loss.l_cls) << ','
       << format_double(r.train_loss.l_rc) << ',' << format_double(r.train_loss.total) << ','
       << format_double(r.val_loss.l_cls) << ',' << format_double(r.val_loss.l_rc) << ','
       << format_double(r.val_loss.total) << ',' << format_double(r.val_accuracy) << ','
       << format_double(r.val_mean_drift) << '\n';
  }
}

void write_train_summary(const TrainLog& log, std::optional<double> selected_lambda,
                         std::ostream& os) {
  os << "epochs_run = " << log.epochs.size() << '\n';
  os << "best_epoch = " << log.best_epoch << '\n';
  os << "stop_reason = " << log.stop_reason << '\n';
  if (!log.epochs.empty()) {
    const EpochRecord& best = log.epochs[static_cast<std::size_t>(log.best_epoch - 1)];
    os << "best_val_total = " << format_double(best.val_loss.total) << '\n';
    os << "best_val_accuracy = " << format_double(best.val_accuracy) << '\n';
    os << "lambda = " << format_double(best.val_loss.lambda) << '\n';
  }
  if (selected_lambda) os << "selected_lambda = " << format_double(*selected_lambda) << '\n';
}

}  // namespace rcgrf
