#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcgrf/data.hpp"
#include "rcgrf/train.hpp"

namespace rcgrf {

/// Flat key = value experiment configuration. Every key has a default;
/// unknown keys are rejected before any work starts.
struct RunConfig {
  // model / training
  std::string model = "gru";  // gru | lstm | rcgru
  std::uint64_t seed = 42;
  double learning_rate = 0.001;
  int batch_size = 64;
  double lambda = 0.1;
  int hidden_dim = 32;
  int max_epochs = 100;
  int patience = 10;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double grad_clip_norm = 0.0;
  // patient-level split
  double train_frac = 0.7;
  double val_frac = 0.15;
  double test_frac = 0.15;
  // synthesis
  int n_patients = 20;
  int seqs_per_patient = 10;
  int classes = 3;
  int input_dim = 2;
  int window_len = 64;
  double noise_std = 0.2;
  double missing_frac = 0.0;
  // evaluation-time corruption of the test split
  double test_noise_std = 0.0;
  double test_missing_frac = 0.0;
  // sweep / comparison
  std::string lambda_grid = "0.01,0.05,0.1";
  int n_seeds = 5;
  // drift reporting
  double drift_epsilon = 1e-8;
  double drift_threshold = 10.0;
  int plot_sequences = 4;

  /// Set one key from its text form; unknown key or bad value throws.
  void set(const std::string& key, const std::string& value);

  /// Range-checks every field; called before any command runs.
  void validate() const;

  static RunConfig from_file(const std::string& path);

  ModelKind model_kind() const;
  TrainConfig train_config() const;
  SynthConfig synth_config() const;
  SplitSpec split_spec() const;
  std::vector<double> parsed_lambda_grid() const;
};

}  // namespace rcgrf
