// Acceptance suite: each criterion prints exactly one [PASS]/[FAIL] line.
// Run all criteria with no arguments or a single one via --criterion N.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rcgrf/config.hpp"
#include "rcgrf/diagnostics.hpp"
#include "rcgrf/metrics.hpp"
#include "rcgrf/model_io.hpp"
#include "rcgrf/text.hpp"

using namespace rcgrf;
namespace fs = std::filesystem;

namespace {

struct CriterionResult {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------
// shared helpers

constexpr std::uint64_t kTestCorruptStream = 7001;

Split benchmark_split(std::uint64_t seed, double test_noise_std) {
  SynthConfig cfg;  // defaults: C=3, d=2, T=64, 20 patients x 10 sequences, noise 0.2
  Dataset full = synth_generate(Rng(seed), cfg);
  SplitSpec spec;
  spec.seed = seed;
  Split split = patient_split(full, spec);
  zscore_fit_apply(split.train, {&split.val, &split.test});
  if (test_noise_std > 0.0) {
    split.test = corrupt(split.test, Rng(seed).split(kTestCorruptStream), test_noise_std, 0.0);
  }
  return split;
}

TrainConfig benchmark_train_config(std::uint64_t seed, double lambda) {
  TrainConfig cfg;  // lr 0.001, batch 64 per the documented protocol
  cfg.hidden_dim = 32;
  // The regularized objective needs a long budget: validation loss dips,
  // plateaus while the consistency term reshapes the dynamics, then
  // recovers. Best-epoch parameters are restored either way.
  cfg.max_epochs = 400;
  cfg.patience = 150;
  cfg.seed = seed;
  cfg.lambda = lambda;
  return cfg;
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return "<unreadable:" + path.string() + ">";
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(RCGRF_CLI_PATH) + " " + args + " >acc_cli_stdout.txt 2>acc_cli_stderr.txt";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

// ---------------------------------------------------------------------------
// criterion 1: analytic gradients of the combined objective vs central
// finite differences, 20 random configurations per cell kind.

CriterionResult criterion_gradients() {
  std::size_t configs = 0, coords = 0, failures = 0;
  double worst = 0.0;
  for (CellKind kind : {CellKind::kGru, CellKind::kLstm}) {
    for (int trial = 0; trial < 20; ++trial) {
      const double lambda = trial % 2 == 0 ? 0.0 : 0.05;
      Rng rng(static_cast<std::uint64_t>(9000 + trial + (kind == CellKind::kLstm ? 500 : 0)));
      const Index d = 1 + static_cast<Index>(rng.next_u64() % 6);
      const Index k = 1 + static_cast<Index>(rng.next_u64() % 6);
      const Index steps = 2 + static_cast<Index>(rng.next_u64() % 7);  // 2..8
      const int num_classes = 2 + static_cast<int>(rng.next_u64() % 3);

      CellParams params = CellParams::init(kind, d, k, num_classes, rng.split(0));
      SequenceSample sample;
      sample.patient_id = "P";
      sample.record_id = "R";
      sample.label = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(num_classes));
      for (Index t = 0; t < steps; ++t) {
        sample.inputs.push_back(gaussian(rng.split(10 + t), d, 0.0, 1.0));
      }
      sample.mask.assign(static_cast<std::size_t>(steps), 1);

      const TotalLossResult analytic = total_loss(params, sample, lambda);
      const auto check = oracles::finite_diff_check(
          params, oracles::grad_coords(analytic.grads),
          [&]() {
            const HiddenTrajectory traj = forward(params, sample.inputs);
            const double cls =
                cross_entropy(readout_logits(params, traj.last_state()), sample.label).first;
            return cls + lambda * rc_loss(traj.states).value;
          },
          1e-5, 1e-4, 1e-7);
      ++configs;
      coords += check.checked;
      failures += check.failed;
      worst = std::max(worst, check.worst_abs_diff);
    }
  }
  CriterionResult r;
  r.pass = failures == 0;
  r.detail = std::to_string(configs) + " configs, " + std::to_string(coords) + " coordinates, " +
             std::to_string(failures) + " outside tolerance, worst abs diff " +
             format_double(worst);
  return r;
}

// ---------------------------------------------------------------------------
// criterion 2: consistency-loss algebra over 1000 random trajectories.

CriterionResult criterion_rc_algebra() {
  Rng rng(4242);
  std::size_t checked = 0, violations = 0, bound_held = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Rng trng = rng.split(trial);
    const Index k = 1 + static_cast<Index>(trng.next_u64() % 6);
    const Index steps = 2 + static_cast<Index>(trng.next_u64() % 10);
    const bool constant = trial % 10 == 0;
    std::vector<Vec> states;
    if (constant) {
      const Vec h = gaussian(trng.split(0), k, 0.0, 2.0);
      states.assign(static_cast<std::size_t>(steps), h);
    } else {
      for (Index t = 0; t < steps; ++t) states.push_back(gaussian(trng.split(t), k, 0.0, 2.0));
    }
    const double lambda = trng.uniform(0.0, 2.0);
    const RcLossResult rc = rc_loss(states);
    const DriftReport rep = drift_report(states, states, lambda > 0.0 ? lambda : 0.1);

    bool ok = rc.value >= 0.0;
    if (constant) {
      ok = ok && rc.value == 0.0;
    } else {
      ok = ok && rc.value > 0.0;  // random states are almost surely non-constant
    }
    double mean_sq = 0.0;
    for (double d : rep.per_step_drift) mean_sq += d * d;
    mean_sq /= static_cast<double>(steps - 1);
    ok = ok && std::abs(mean_sq - rc.value) <= 1e-9 * std::max(1.0, rc.value);
    ok = ok && rep.max_drift * rep.max_drift <= static_cast<double>(steps - 1) * rc.value + 1e-9;
    if (rep.paper_bound_holds) ++bound_held;
    ++checked;
    if (!ok) ++violations;
  }
  CriterionResult r;
  r.pass = violations == 0;
  r.detail = std::to_string(checked) + " trajectories, " + std::to_string(violations) +
             " violations; recorded sqrt(l_rc/lambda) bound hold rate " +
             format_double(static_cast<double>(bound_held) / static_cast<double>(checked)) +
             " (reported, never asserted)";
  return r;
}

// ---------------------------------------------------------------------------
// criterion 3: lambda = 0.1 halves the converged validation l_rc
// relative to lambda = 0, averaged over 5 seeds.

CriterionResult criterion_drift_reduction() {
  double sum_base = 0.0, sum_rc = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Split split = benchmark_split(seed, 0.0);
    const TrainResult base =
        train(ModelKind::kGru, split.train, split.val, benchmark_train_config(seed, 0.0));
    const TrainResult reg =
        train(ModelKind::kRcGru, split.train, split.val, benchmark_train_config(seed, 0.1));
    const auto& base_best =
        base.log.epochs[static_cast<std::size_t>(base.log.best_epoch - 1)];
    const auto& reg_best = reg.log.epochs[static_cast<std::size_t>(reg.log.best_epoch - 1)];
    sum_base += base_best.val_loss.l_rc;
    sum_rc += reg_best.val_loss.l_rc;
  }
  const double mean_base = sum_base / 5.0;
  const double mean_rc = sum_rc / 5.0;
  CriterionResult r;
  r.pass = mean_rc < 0.5 * mean_base;
  r.detail = "mean val l_rc over 5 seeds: lambda=0.1 gives " + format_double(mean_rc) +
             ", lambda=0 baseline gives " + format_double(mean_base) + " (ratio " +
             format_double(mean_rc / mean_base) + ", required < 0.5)";
  return r;
}

// ---------------------------------------------------------------------------
// criterion 4: under test-time corruption noise 0.3, mean RC-GRU accuracy
// (lambda via sweep) is at least mean GRU accuracy over 5 seeds.

CriterionResult criterion_robustness() {
  const std::vector<double> grid = {0.01, 0.05, 0.1};
  double sum_gru = 0.0, sum_rc = 0.0;
  std::vector<double> chosen;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Split split = benchmark_split(seed, 0.3);
    const TrainConfig cfg = benchmark_train_config(seed, 0.0);
    const TrainResult gru = train(ModelKind::kGru, split.train, split.val, cfg);
    sum_gru += summarize(evaluate(gru.params, split.test)).accuracy;

    const SweepResult sweep = lambda_sweep(split.train, split.val, cfg, grid);
    chosen.push_back(sweep.selected_lambda());
    sum_rc += summarize(evaluate(sweep.selected_run().params, split.test)).accuracy;
  }
  const double mean_gru = sum_gru / 5.0;
  const double mean_rc = sum_rc / 5.0;
  CriterionResult r;
  r.pass = mean_rc >= mean_gru;
  std::string lambdas;
  for (double l : chosen) lambdas += (lambdas.empty() ? "" : ",") + format_double(l);
  r.detail = "mean corrupted-test accuracy over 5 seeds: RC-GRU " + format_double(mean_rc) +
             " vs GRU " + format_double(mean_gru) + ", gap " +
             format_fixed(100.0 * (mean_rc - mean_gru), 2) +
             " percentage points (selected lambdas " + lambdas + ")";
  return r;
}

// ---------------------------------------------------------------------------
// criterion 5: the rc pipeline at lambda = 0 and the baseline pipeline
// produce bitwise-identical logs and metrics.

CriterionResult criterion_lambda_zero_equivalence() {
  SynthConfig data_cfg;
  data_cfg.n_patients = 10;
  data_cfg.seqs_per_patient = 5;
  data_cfg.window_len = 24;
  Dataset full = synth_generate(Rng(33), data_cfg);
  SplitSpec spec;
  spec.seed = 33;
  Split split = patient_split(full, spec);
  zscore_fit_apply(split.train, {&split.val, &split.test});

  TrainConfig cfg;
  cfg.hidden_dim = 8;
  cfg.batch_size = 16;
  cfg.max_epochs = 6;
  cfg.patience = 6;
  cfg.seed = 33;

  cfg.lambda = 0.0;
  const TrainResult rc = train(ModelKind::kRcGru, split.train, split.val, cfg);
  cfg.lambda = 0.7;  // ignored by baselines
  const TrainResult baseline = train(ModelKind::kGru, split.train, split.val, cfg);

  std::ostringstream log_rc, log_base, met_rc, met_base;
  write_train_log_csv(rc.log, log_rc);
  write_train_log_csv(baseline.log, log_base);
  write_metrics(summarize(evaluate(rc.params, split.test)), met_rc);
  write_metrics(summarize(evaluate(baseline.params, split.test)), met_base);

  CriterionResult r;
  r.pass = log_rc.str() == log_base.str() && met_rc.str() == met_base.str();
  r.detail = std::string("training logs ") +
             (log_rc.str() == log_base.str() ? "identical" : "DIFFER") + ", metrics " +
             (met_rc.str() == met_base.str() ? "identical" : "DIFFER") + " over " +
             std::to_string(rc.log.epochs.size()) + " epochs";
  return r;
}

// ---------------------------------------------------------------------------
// criterion 6: metrics against the hand fixture and a brute-force oracle.

CriterionResult criterion_metrics_oracle() {
  ConfusionMatrix fixture(2);
  fixture.counts << 8, 2, 1, 9;
  const MetricSummary m = summarize(fixture);
  bool ok = std::abs(m.accuracy - 0.85) <= 1e-9;
  ok = ok && std::abs(m.f1_macro - (16.0 / 19.0 + 18.0 / 21.0) / 2.0) <= 1e-9;

  Rng rng(606);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Rng trng = rng.split(trial);
    const int num_classes = 2 + static_cast<int>(trng.next_u64() % 5);
    const int n = 1 + static_cast<int>(trng.next_u64() % 80);
    std::vector<int> truth(static_cast<std::size_t>(n)), pred(static_cast<std::size_t>(n));
    ConfusionMatrix cm(num_classes);
    for (int i = 0; i < n; ++i) {
      truth[static_cast<std::size_t>(i)] = static_cast<int>(trng.next_u64() % num_classes);
      pred[static_cast<std::size_t>(i)] = static_cast<int>(trng.next_u64() % num_classes);
      cm.add(truth[static_cast<std::size_t>(i)], pred[static_cast<std::size_t>(i)]);
    }
    const MetricSummary ours = summarize(cm);
    const oracles::BruteMetrics ref = oracles::brute_metrics(truth, pred, num_classes);
    if (std::abs(ours.accuracy - ref.accuracy) > 1e-12 ||
        std::abs(ours.precision_macro - ref.precision_macro) > 1e-12 ||
        std::abs(ours.recall_macro - ref.recall_macro) > 1e-12 ||
        std::abs(ours.f1_macro - ref.f1_macro) > 1e-12) {
      ++mismatches;
    }
  }
  CriterionResult r;
  r.pass = ok && mismatches == 0;
  r.detail = "fixture accuracy " + format_double(m.accuracy) + ", macro f1 " +
             format_double(m.f1_macro) + "; 200 randomized matrices, " +
             std::to_string(mismatches) + " brute-force mismatches";
  return r;
}

// ---------------------------------------------------------------------------
// criterion 7: adam against the hand-unrolled two-step recursion and the
// first-step magnitude identity.

CriterionResult criterion_adam_oracle() {
  Rng rng(707);
  CellParams p = CellParams::init(CellKind::kGru, 3, 4, 3, rng.split(0));
  ParamGrads grads = ParamGrads::zeros_like(p);
  Rng grng = rng.split(1);
  for (auto& blk : grads.gates) {
    for (long i = 0; i < blk.w.size(); ++i) blk.w.data()[i] = grng.uniform(-2, 2);
    for (long i = 0; i < blk.u.size(); ++i) blk.u.data()[i] = grng.uniform(-2, 2);
    for (long i = 0; i < blk.b.size(); ++i) blk.b.data()[i] = grng.uniform(-2, 2);
  }
  for (long i = 0; i < grads.readout_w.size(); ++i) grads.readout_w.data()[i] = grng.uniform(-2, 2);
  for (long i = 0; i < grads.readout_b.size(); ++i) grads.readout_b.data()[i] = grng.uniform(-2, 2);

  TrainConfig cfg;
  CellParams start = p;
  std::vector<double> p0;
  for (double* c : oracles::param_coords(start)) p0.push_back(*c);
  const std::vector<double> g = oracles::grad_coords(grads);

  AdamState state = AdamState::zeros_like(p);
  adam_step(p, grads, state, cfg);

  // first-step magnitude: |dp| = lr |g| / (|g| + eps), sign opposing g
  std::size_t magnitude_failures = 0;
  {
    const auto now = oracles::param_coords(p);
    for (std::size_t i = 0; i < now.size(); ++i) {
      const double delta = *now[i] - p0[i];
      const double expected = cfg.learning_rate * std::abs(g[i]) / (std::abs(g[i]) + cfg.adam_epsilon);
      if (std::abs(std::abs(delta) - expected) > 1e-12 * std::max(1.0, expected)) {
        ++magnitude_failures;
      }
      if (g[i] != 0.0 && delta * g[i] >= 0.0) ++magnitude_failures;
    }
  }

  adam_step(p, grads, state, cfg);
  const std::vector<double> expected = oracles::adam_two_steps(
      p0, g, cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon);
  std::size_t recursion_failures = 0;
  double worst_rel = 0.0;
  {
    const auto now = oracles::param_coords(p);
    for (std::size_t i = 0; i < now.size(); ++i) {
      const double rel =
          std::abs(*now[i] - expected[i]) / std::max(1e-300, std::abs(expected[i]));
      worst_rel = std::max(worst_rel, rel);
      if (rel > 1e-12) ++recursion_failures;
    }
  }
  CriterionResult r;
  r.pass = magnitude_failures == 0 && recursion_failures == 0;
  r.detail = std::to_string(p0.size()) + " coordinates; first-step magnitude failures " +
             std::to_string(magnitude_failures) + ", two-step recursion failures " +
             std::to_string(recursion_failures) + " (worst rel " + format_double(worst_rel) + ")";
  return r;
}

// ---------------------------------------------------------------------------
// criterion 8: byte-identical CLI outputs under a fixed seed.

CriterionResult criterion_determinism() {
  const std::string flags =
      "--seed 11 --set n_patients=8 --set seqs_per_patient=4 --set window_len=12 "
      "--set hidden_dim=6 --set batch_size=16 --set max_epochs=3 --set n_seeds=2 "
      "--set lambda_grid=0.01,0.1 --set test_noise_std=0.1";
  for (const char* dir : {"acc8_a", "acc8_b", "acc8_s1", "acc8_s2"}) fs::remove_all(dir);

  bool ok = run_cli("compare " + flags + " --out acc8_a") == 0;
  ok = ok && run_cli("compare " + flags + " --out acc8_b") == 0;
  const bool csv_same = read_file("acc8_a/comparison.csv") == read_file("acc8_b/comparison.csv");
  const bool txt_same = read_file("acc8_a/comparison.txt") == read_file("acc8_b/comparison.txt");

  ok = ok && run_cli("synth --seed 11 --out acc8_s1") == 0;
  ok = ok && run_cli("synth --seed 11 --out acc8_s2") == 0;
  const bool synth_same = read_file("acc8_s1/data.csv") == read_file("acc8_s2/data.csv");

  CriterionResult r;
  r.pass = ok && csv_same && txt_same && synth_same;
  r.detail = std::string("compare tables ") + (csv_same && txt_same ? "byte-identical" : "DIFFER") +
             ", synthesized dataset " + (synth_same ? "byte-identical" : "DIFFERS") +
             " across reruns";
  for (const char* dir : {"acc8_a", "acc8_b", "acc8_s1", "acc8_s2"}) fs::remove_all(dir);
  return r;
}

// ---------------------------------------------------------------------------
// criterion 9: patient-level splits never leak and normalization is a
// function of the training split alone.

CriterionResult criterion_data_hygiene() {
  Rng rng(909);
  std::size_t leaks = 0, stat_mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng trng = rng.split(trial);
    SynthConfig cfg;
    cfg.n_patients = 7 + static_cast<int>(trng.next_u64() % 24);
    cfg.seqs_per_patient = 3 + static_cast<int>(trng.next_u64() % 6);
    cfg.num_classes = 2 + static_cast<int>(trng.next_u64() % 3);
    cfg.window_len = 8 + static_cast<Index>(trng.next_u64() % 12);
    cfg.noise_std = trng.uniform(0.0, 0.5);
    if (cfg.seqs_per_patient < cfg.num_classes) cfg.seqs_per_patient = cfg.num_classes;
    const Dataset full = synth_generate(Rng(trng.next_u64()), cfg);
    SplitSpec spec;
    spec.seed = trng.next_u64();
    Split split = patient_split(full, spec);

    std::set<std::string> train_p, val_p, test_p;
    for (const auto& s : split.train.samples) train_p.insert(s.patient_id);
    for (const auto& s : split.val.samples) val_p.insert(s.patient_id);
    for (const auto& s : split.test.samples) test_p.insert(s.patient_id);
    for (const auto& p : val_p) {
      if (train_p.count(p) || test_p.count(p)) ++leaks;
    }
    for (const auto& p : test_p) {
      if (train_p.count(p)) ++leaks;
    }
    if (split.train.size() + split.val.size() + split.test.size() != full.size()) ++leaks;

    // stats must ignore the other splits entirely
    const NormStats a = zscore_fit(split.train);
    Split mutated = split;
    mutated.val = corrupt(mutated.val, Rng(1), 3.0, 0.2);
    mutated.test = corrupt(mutated.test, Rng(2), 3.0, 0.2);
    Dataset train_copy = mutated.train;
    const NormStats b = zscore_fit_apply(train_copy, {&mutated.val, &mutated.test});
    if (a.mean != b.mean || a.std != b.std) ++stat_mismatches;
  }
  CriterionResult r;
  r.pass = leaks == 0 && stat_mismatches == 0;
  r.detail = "100 random datasets: " + std::to_string(leaks) + " split leaks, " +
             std::to_string(stat_mismatches) + " normalization-stat mismatches";
  return r;
}

struct Criterion {
  int number;
  const char* title;
  std::function<CriterionResult()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[i + 1]);
      ++i;
    } else {
      std::cerr << "usage: acceptance [--criterion N]\n";
      return 2;
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "exact BPTT gradients of the combined objective vs finite differences",
       criterion_gradients},
      {2, "consistency-loss algebra and the recorded divergence bound", criterion_rc_algebra},
      {3, "lambda = 0.1 more than halves converged validation l_rc vs lambda = 0",
       criterion_drift_reduction},
      {4, "RC-GRU is at least as accurate as GRU under test-time corruption",
       criterion_robustness},
      {5, "lambda = 0 pipeline is bitwise identical to the baseline",
       criterion_lambda_zero_equivalence},
      {6, "metric summaries match hand fixture and brute-force recomputation",
       criterion_metrics_oracle},
      {7, "adam matches the hand-unrolled recursion and first-step magnitude",
       criterion_adam_oracle},
      {8, "CLI compare and synth are byte-identical under a fixed seed", criterion_determinism},
      {9, "patient splits never leak and z-score stats are train-only", criterion_data_hygiene},
  };

  bool all_pass = true;
  bool any_run = false;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.number != only) continue;
    any_run = true;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult result;
    try {
      result = c.run();
    } catch (const std::exception& e) {
      result.pass = false;
      result.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (result.pass ? "[PASS]" : "[FAIL]") << " criterion " << c.number << ": "
              << c.title << " | " << result.detail << " (" << format_fixed(secs, 1) << " s)\n";
    all_pass = all_pass && result.pass;
  }
  if (!any_run) {
    std::cerr << "no such criterion\n";
    return 2;
  }
  return all_pass ? 0 : 1;
}
