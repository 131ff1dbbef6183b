#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rcgrf/cells.hpp"
#include "rcgrf/data.hpp"
#include "rcgrf/objective.hpp"

namespace rcgrf {

struct TrainConfig {
  double learning_rate = 0.001;
  int batch_size = 64;
  double lambda = 0.0;
  Index hidden_dim = 32;  // published protocol uses 128; 32 keeps runs desk-scale
  int max_epochs = 100;
  int patience = 10;
  std::uint64_t seed = 42;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double grad_clip_norm = 0.0;  // 0 disables clipping

  void validate() const;
};

/// First/second moment accumulators, shape-congruent with the params.
struct AdamState {
  ParamGrads m;
  ParamGrads v;
  long step = 0;

  static AdamState zeros_like(const CellParams& params);
};

/// One bias-corrected Adam update in place.
void adam_step(CellParams& params, const ParamGrads& grads, AdamState& state,
               const TrainConfig& config);

struct EpochRecord {
  int epoch = 0;
  LossBreakdown train_loss;
  LossBreakdown val_loss;
  double val_accuracy = 0.0;
  double val_mean_drift = 0.0;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  std::string stop_reason;  // "early_stop" or "max_epochs"
};

/// LSTM and GRU are the unregularized baselines (lambda forced to 0);
/// kRcGru is a GRU trained on the combined objective with config.lambda.
enum class ModelKind { kLstm, kGru, kRcGru };

const char* model_kind_name(ModelKind kind);
std::optional<ModelKind> model_kind_from_name(const std::string& name);

struct TrainResult {
  CellParams params;
  TrainLog log;
};

/// Mini-batch training with seeded shuffling and early stopping on
/// validation total loss; returns the best-validation-epoch parameters.
TrainResult train(ModelKind kind, const Dataset& train_data, const Dataset& val_data,
                  const TrainConfig& config);

/// Mean loss, accuracy, and mean per-step drift over a dataset at fixed
/// parameters (one forward pass per sample).
struct EvalStats {
  LossBreakdown loss;
  double accuracy = 0.0;
  double mean_drift = 0.0;
};

EvalStats evaluate_loss(const CellParams& params, const Dataset& data, double lambda);

struct SweepRun {
  double lambda = 0.0;
  TrainResult result;
  double best_val_loss = 0.0;
};

struct SweepResult {
  std::vector<SweepRun> runs;  // ascending lambda
  std::size_t selected = 0;

  double selected_lambda() const { return runs[selected].lambda; }
  const TrainResult& selected_run() const { return runs[selected].result; }
};

/// Trains once per lambda under an identical seed and picks the best
/// validation loss; ties go to the smaller lambda.
SweepResult lambda_sweep(const Dataset& train_data, const Dataset& val_data,
                         const TrainConfig& config, const std::vector<double>& grid);

void write_train_log_csv(const TrainLog& log, std::ostream& os);
void write_train_summary(const TrainLog& log, std::optional<double> selected_lambda,
                         std::ostream& os);

}  // namespace rcgrf
