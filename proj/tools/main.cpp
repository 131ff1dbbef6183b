#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rcgrf/config.hpp"
#include "rcgrf/diagnostics.hpp"
#include "rcgrf/metrics.hpp"
#include "rcgrf/model_io.hpp"
#include "rcgrf/text.hpp"

namespace fs = std::filesystem;
using namespace rcgrf;

namespace {

constexpr std::uint64_t kTestCorruptStream = 7001;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::string data_path;
  std::string model_file;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

RunConfig make_config(const CommonArgs& args) {
  RunConfig cfg = args.config_path.empty() ? RunConfig{} : RunConfig::from_file(args.config_path);
  for (const std::string& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::kConfig, "--set expects key=value, got '" + kv + "'");
    }
    cfg.set(std::string(trim(std::string_view(kv).substr(0, eq))),
            std::string(trim(std::string_view(kv).substr(eq + 1))));
  }
  if (args.seed) cfg.seed = *args.seed;
  cfg.validate();
  return cfg;
}

fs::path ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create output directory '" + out_dir + "': " + ec.message());
  return fs::path(out_dir);
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  fn(os);
  if (!os) fail(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

Dataset obtain_data(const RunConfig& cfg, const std::string& data_path, std::uint64_t seed) {
  if (!data_path.empty()) return load_csv(data_path);
  return synth_generate(Rng(seed), cfg.synth_config());
}

Split prepare_splits(const RunConfig& cfg, const Dataset& full, std::uint64_t seed) {
  SplitSpec spec = cfg.split_spec();
  spec.seed = seed;
  Split split = patient_split(full, spec);
  zscore_fit_apply(split.train, {&split.val, &split.test});
  if (cfg.test_noise_std > 0.0 || cfg.test_missing_frac > 0.0) {
    split.test = corrupt(split.test, Rng(seed).split(kTestCorruptStream), cfg.test_noise_std,
                         cfg.test_missing_frac);
  }
  return split;
}

int cmd_synth(const CommonArgs& args) {
  const RunConfig cfg = make_config(args);
  const fs::path out = ensure_out_dir(args.out_dir);
  const Dataset ds = synth_generate(Rng(cfg.seed), cfg.synth_config());
  write_csv_file(ds, (out / "data.csv").string());
  std::cout << "wrote " << ds.size() << " sequences to " << (out / "data.csv").string() << '\n';
  return 0;
}

int cmd_train(const CommonArgs& args) {
  const RunConfig cfg = make_config(args);
  const fs::path out = ensure_out_dir(args.out_dir);
  const Dataset full = obtain_data(cfg, args.data_path, cfg.seed);
  Split split = prepare_splits(cfg, full, cfg.seed);

  const TrainResult result = train(cfg.model_kind(), split.train, split.val, cfg.train_config());
  save_model(result.params, (out / "model.bin").string());
  write_file(out / "train_log.csv", [&](std::ostream& os) { write_train_log_csv(result.log, os); });
  write_file(out / "summary.txt",
             [&](std::ostream& os) { write_train_summary(result.log, std::nullopt, os); });
  const MetricSummary metrics = summarize(evaluate(result.params, split.test));
  write_file(out / "metrics.txt", [&](std::ostream& os) { write_metrics(metrics, os); });
  std::cout << "model " << cfg.model << ": best epoch " << result.log.best_epoch
            << ", test accuracy " << format_fixed(100.0 * metrics.accuracy, 1) << "%\n";
  return 0;
}

int cmd_sweep(const CommonArgs& args) {
  const RunConfig cfg = make_config(args);
  const fs::path out = ensure_out_dir(args.out_dir);
  const Dataset full = obtain_data(cfg, args.data_path, cfg.seed);
  Split split = prepare_splits(cfg, full, cfg.seed);

  const SweepResult sweep =
      lambda_sweep(split.train, split.val, cfg.train_config(), cfg.parsed_lambda_grid());
  for (const SweepRun& run : sweep.runs) {
    write_file(out / ("train_log_lambda_" + format_double(run.lambda) + ".csv"),
               [&](std::ostream& os) { write_train_log_csv(run.result.log, os); });
  }
  const TrainResult& best = sweep.selected_run();
  save_model(best.params, (out / "model.bin").string());
  write_file(out / "summary.txt", [&](std::ostream& os) {
    write_train_summary(best.log, sweep.selected_lambda(), os);
    for (const SweepRun& run : sweep.runs) {
      os << "val_total[lambda=" << format_double(run.lambda)
         << "] = " << format_double(run.best_val_loss) << '\n';
    }
  });
  const MetricSummary metrics = summarize(evaluate(best.params, split.test));
  write_file(out / "metrics.txt", [&](std::ostream& os) { write_metrics(metrics, os); });
  std::cout << "selected lambda " << format_double(sweep.selected_lambda()) << ", test accuracy "
            << format_fixed(100.0 * metrics.accuracy, 1) << "%\n";
  return 0;
}

struct CompareRow {
  std::string model;
  std::uint64_t seed = 0;
  std::optional<double> selected_lambda;
  MetricSummary metrics;
};

struct Aggregate {
  double mean[4] = {0, 0, 0, 0};
  double stdev[4] = {0, 0, 0, 0};
};

Aggregate aggregate_rows(const std::vector<CompareRow>& rows, const std::string& model) {
  std::vector<std::array<double, 4>> vals;
  for (const CompareRow& r : rows) {
    if (r.model == model) {
      vals.push_back({r.metrics.accuracy, r.metrics.precision_macro, r.metrics.recall_macro,
                      r.metrics.f1_macro});
    }
  }
  Aggregate agg;
  const double n = static_cast<double>(vals.size());
  for (const auto& v : vals) {
    for (int i = 0; i < 4; ++i) agg.mean[i] += v[i];
  }
  for (int i = 0; i < 4; ++i) agg.mean[i] /= n;
  for (const auto& v : vals) {
    for (int i = 0; i < 4; ++i) {
      agg.stdev[i] += (v[i] - agg.mean[i]) * (v[i] - agg.mean[i]);
    }
  }
  for (int i = 0; i < 4; ++i) agg.stdev[i] = std::sqrt(agg.stdev[i] / n);
  return agg;
}

int cmd_compare(const CommonArgs& args) {
  const RunConfig cfg = make_config(args);
  const fs::path out = ensure_out_dir(args.out_dir);

  std::optional<Dataset> loaded;
  if (!args.data_path.empty()) loaded = load_csv(args.data_path);

  std::vector<CompareRow> rows;
  for (int s = 0; s < cfg.n_seeds; ++s) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(s);
    const Dataset full = loaded ? *loaded : synth_generate(Rng(seed), cfg.synth_config());
    Split split = prepare_splits(cfg, full, seed);
    TrainConfig tc = cfg.train_config();
    tc.seed = seed;

    for (const ModelKind kind : {ModelKind::kLstm, ModelKind::kGru}) {
      const TrainResult r = train(kind, split.train, split.val, tc);
      rows.push_back(CompareRow{kind == ModelKind::kLstm ? "LSTM" : "GRU", seed, std::nullopt,
                                summarize(evaluate(r.params, split.test))});
    }
    const SweepResult sweep =
        lambda_sweep(split.train, split.val, tc, cfg.parsed_lambda_grid());
    rows.push_back(CompareRow{"RC-GRU", seed, sweep.selected_lambda(),
                              summarize(evaluate(sweep.selected_run().params, split.test))});
  }

  static const char* kModels[3] = {"LSTM", "GRU", "RC-GRU"};
  write_file(out / "comparison.csv", [&](std::ostream& os) {
    os << "model,seed,selected_lambda,accuracy,precision_macro,recall_macro,f1_macro\n";
    for (const CompareRow& r : rows) {
      os << r.model << ',' << r.seed << ','
         << (r.selected_lambda ? format_double(*r.selected_lambda) : std::string()) << ','
         << format_double(r.metrics.accuracy) << ',' << format_double(r.metrics.precision_macro)
         << ',' << format_double(r.metrics.recall_macro) << ','
         << format_double(r.metrics.f1_macro) << '\n';
    }
    for (const char* model : kModels) {
      const Aggregate agg = aggregate_rows(rows, model);
      os << model << ",mean,," << format_double(agg.mean[0]) << ',' << format_double(agg.mean[1])
         << ',' << format_double(agg.mean[2]) << ',' << format_double(agg.mean[3]) << '\n';
      os << model << ",std,," << format_double(agg.stdev[0]) << ',' << format_double(agg.stdev[1])
         << ',' << format_double(agg.stdev[2]) << ',' << format_double(agg.stdev[3]) << '\n';
    }
  });

  double gru_acc = 0.0, rc_acc = 0.0;
  write_file(out / "comparison.txt", [&](std::ostream& os) {
    os << "model      accuracy        precision       recall          f1\n";
    for (const char* model : kModels) {
      const Aggregate agg = aggregate_rows(rows, model);
      char line[160];
      std::snprintf(line, sizeof(line), "%-10s", model);
      os << line;
      for (int i = 0; i < 4; ++i) {
        std::snprintf(line, sizeof(line), "%5.1f +- %-5.1f  ", 100.0 * agg.mean[i],
                      100.0 * agg.stdev[i]);
        os << line;
      }
      os << '\n';
      if (std::string(model) == "GRU") gru_acc = agg.mean[0];
      if (std::string(model) == "RC-GRU") rc_acc = agg.mean[0];
    }
    os << "\nn_seeds = " << cfg.n_seeds << '\n';
    os << "test_noise_std = " << format_double(cfg.test_noise_std) << '\n';
    os << "rcgru_minus_gru_accuracy_pp = " << format_fixed(100.0 * (rc_acc - gru_acc), 2) << '\n';
  });

  std::cout << "RC-GRU minus GRU accuracy: " << format_fixed(100.0 * (rc_acc - gru_acc), 2)
            << " percentage points over " << cfg.n_seeds << " seeds\n";
  return 0;
}

int cmd_drift(const CommonArgs& args) {
  const RunConfig cfg = make_config(args);
  if (args.model_file.empty()) fail(ErrorCode::kConfig, "drift: --model-file is required");
  const fs::path out = ensure_out_dir(args.out_dir);
  const CellParams params = load_model(args.model_file);
  const Dataset full = obtain_data(cfg, args.data_path, cfg.seed);
  Split split = prepare_splits(cfg, full, cfg.seed);

  std::vector<DriftReport> reports;
  reports.reserve(split.test.samples.size());
  for (const SequenceSample& s : split.test.samples) {
    const HiddenTrajectory traj = forward(params, s.inputs);
    reports.push_back(drift_report(traj, cfg.lambda, cfg.drift_epsilon));
  }
  if (reports.empty()) fail(ErrorCode::kData, "drift: test split is empty");

  const std::size_t n_plot =
      std::min(reports.size(), static_cast<std::size_t>(cfg.plot_sequences));
  for (std::size_t i = 0; i < n_plot; ++i) {
    write_file(out / ("drift_seq_" + std::to_string(i) + ".csv"),
               [&](std::ostream& os) { write_drift_csv(reports[i], os); });
  }
  write_file(out / "drift_summary.txt", [&](std::ostream& os) {
    write_drift_summary(reports, cfg.drift_threshold, os);
  });
  const std::vector<DriftReport> plotted(reports.begin(),
                                         reports.begin() + static_cast<std::ptrdiff_t>(n_plot));
  write_file(out / "drift.svg", [&](std::ostream& os) { write_drift_svg(plotted, os); });
  std::cout << "wrote drift reports for " << reports.size() << " sequences\n";
  return 0;
}

int cmd_eval(const CommonArgs& args) {
  const RunConfig cfg = make_config(args);
  if (args.model_file.empty()) fail(ErrorCode::kConfig, "eval: --model-file is required");
  const fs::path out = ensure_out_dir(args.out_dir);
  const CellParams params = load_model(args.model_file);
  const Dataset full = obtain_data(cfg, args.data_path, cfg.seed);
  Split split = prepare_splits(cfg, full, cfg.seed);

  const ConfusionMatrix cm = evaluate(params, split.test);
  const MetricSummary metrics = summarize(cm);
  write_file(out / "metrics.txt", [&](std::ostream& os) { write_metrics(metrics, os); });
  write_file(out / "confusion.csv", [&](std::ostream& os) { write_confusion_csv(cm, os); });
  std::cout << "test accuracy " << format_fixed(100.0 * metrics.accuracy, 1) << "%\n";
  return 0;
}

void add_common(CLI::App* sub, CommonArgs& args, bool with_data, bool with_model) {
  sub->add_option("--config", args.config_path, "flat key = value config file");
  sub->add_option("--set", args.overrides, "override one config key, key=value")
      ->take_all();
  sub->add_option("--seed", args.seed, "override the seed");
  sub->add_option("--out", args.out_dir, "output directory (default: out)");
  if (with_data) {
    sub->add_option("--data", args.data_path,
                    "input CSV; omitted = synthesize from the config");
  }
  if (with_model) {
    sub->add_option("--model-file", args.model_file, "trained model file")->required();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"training engine for gated recurrent sequence classifiers with "
               "representation-consistency regularization"};
  app.require_subcommand(1);

  CommonArgs synth_args, train_args, sweep_args, compare_args, drift_args, eval_args;
  add_common(app.add_subcommand("synth", "generate a synthetic benchmark CSV"), synth_args,
             false, false);
  add_common(app.add_subcommand("train", "train one model and evaluate on the test split"),
             train_args, true, false);
  add_common(app.add_subcommand("sweep", "train across the lambda grid and keep the best"),
             sweep_args, true, false);
  add_common(app.add_subcommand("compare", "LSTM vs GRU vs RC-GRU over several seeds"),
             compare_args, true, false);
  add_common(app.add_subcommand("drift", "per-sequence drift reports for a trained model"),
             drift_args, true, true);
  add_common(app.add_subcommand("eval", "evaluate a trained model on the test split"), eval_args,
             true, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("synth")) return cmd_synth(synth_args);
    if (app.got_subcommand("train")) return cmd_train(train_args);
    if (app.got_subcommand("sweep")) return cmd_sweep(sweep_args);
    if (app.got_subcommand("compare")) return cmd_compare(compare_args);
    if (app.got_subcommand("drift")) return cmd_drift(drift_args);
    if (app.got_subcommand("eval")) return cmd_eval(eval_args);
  } catch (const Error& e) {
    std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal_error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
