#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rcgrf/core.hpp"

namespace rcgrf {

/// One fixed-length multivariate window with label and patient identity.
/// `mask[t]` is 1 where step t was observed; unobserved steps hold the
/// last observed values (zeros before the first observation).
struct SequenceSample {
  std::string patient_id;
  std::string record_id;
  int label = 0;
  std::vector<Vec> inputs;         // T vectors of length d
  std::vector<std::uint8_t> mask;  // length T, 1 = observed

  Index steps() const { return static_cast<Index>(inputs.size()); }
  Index dim() const { return inputs.empty() ? 0 : inputs.front().size(); }
};

/// Per-feature normalization statistics (population convention).
struct NormStats {
  Vec mean;
  Vec std;

  bool fitted() const { return mean.size() > 0; }
};

struct Dataset {
  std::vector<SequenceSample> samples;
  int num_classes = 0;
  Index input_dim = 0;
  Index window_len = 0;
  NormStats norm;  // set once z-scoring has been applied

  Index size() const { return static_cast<Index>(samples.size()); }
};

struct SplitSpec {
  double train_frac = 0.7;
  double val_frac = 0.15;
  double test_frac = 0.15;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthConfig {
  int n_patients = 20;
  int seqs_per_patient = 10;
  int num_classes = 3;
  Index input_dim = 2;
  Index window_len = 64;
  double noise_std = 0.2;
  double missing_frac = 0.0;
};

/// Synthetic ECG-like benchmark: per-class waveform templates
/// (sinusoid mixtures plus a localized spike), a fixed per-patient
/// morphology perturbation, additive Gaussian noise, and optional
/// missing steps with last-observed-value imputation.
Dataset synth_generate(Rng rng, const SynthConfig& cfg);

/// CSV schema (header required, time-major flattening):
///   patient_id,record_id,label,x_0_0,...,x_{T-1}_{d-1}
/// Unobserved steps are written as NA in every feature cell of the step.
Dataset load_csv(const std::string& path);
void write_csv(const Dataset& dataset, std::ostream& os);
void write_csv_file(const Dataset& dataset, const std::string& path);

struct Split {
  Dataset train;
  Dataset val;
  Dataset test;
};

/// Partition by patient identity: a patient's sequences all land in the
/// same split. Rounding floors the val/test patient counts and gives the
/// remainder to train.
Split patient_split(const Dataset& dataset, const SplitSpec& spec);

/// Fit per-feature mean/std over every training time step, population
/// std. Constant features are an error.
NormStats zscore_fit(const Dataset& train);
void zscore_apply(Dataset& dataset, const NormStats& stats);

/// Fit on train, apply to train and the others; returns the stats.
NormStats zscore_fit_apply(Dataset& train, const std::vector<Dataset*>& others);

/// Adds iid Gaussian noise to observed steps and masks additional steps
/// at rate `missing_frac`, re-imputing by last observed value. Labels,
/// ids, and shapes are untouched. (0, 0) is the identity.
Dataset corrupt(const Dataset& dataset, Rng rng, double noise_std, double missing_frac);

}  // namespace rcgrf
