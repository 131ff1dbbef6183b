#include "rcgrf/config.hpp"

#include <fstream>
#include <functional>
#include <map>

#include "rcgrf/text.hpp"

namespace rcgrf {

namespace {

double need_double(const std::string& key, const std::string& value) {
  const auto v = parse_double(value);
  if (!v) fail(ErrorCode::kConfig, "config: key '" + key + "' needs a number, got '" + value + "'");
  return *v;
}

long long need_int(const std::string& key, const std::string& value) {
  const auto v = parse_int(value);
  if (!v) fail(ErrorCode::kConfig, "config: key '" + key + "' needs an integer, got '" + value + "'");
  return *v;
}

std::uint64_t need_u64(const std::string& key, const std::string& value) {
  const auto v = parse_int(value);
  if (!v || *v < 0) {
    fail(ErrorCode::kConfig, "config: key '" + key + "' needs a nonnegative integer, got '" +
                                 value + "'");
  }
  return static_cast<std::uint64_t>(*v);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
  static const std::map<std::string, Setter> kSetters = {
      {"model", [](RunConfig& c, const std::string&, const std::string& v) { c.model = v; }},
      {"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = need_u64(k, v); }},
      {"learning_rate", [](RunConfig& c, const std::string& k, const std::string& v) { c.learning_rate = need_double(k, v); }},
      {"batch_size", [](RunConfig& c, const std::string& k, const std::string& v) { c.batch_size = static_cast<int>(need_int(k, v)); }},
      {"lambda", [](RunConfig& c, const std::string& k, const std::string& v) { c.lambda = need_double(k, v); }},
      {"hidden_dim", [](RunConfig& c, const std::string& k, const std::string& v) { c.hidden_dim = static_cast<int>(need_int(k, v)); }},
      {"max_epochs", [](RunConfig& c, const std::string& k, const std::string& v) { c.max_epochs = static_cast<int>(need_int(k, v)); }},
      {"patience", [](RunConfig& c, const std::string& k, const std::string& v) { c.patience = static_cast<int>(need_int(k, v)); }},
      {"adam_beta1", [](RunConfig& c, const std::string& k, const std::string& v) { c.adam_beta1 = need_double(k, v); }},
      {"adam_beta2", [](RunConfig& c, const std::string& k, const std::string& v) { c.adam_beta2 = need_double(k, v); }},
      {"adam_epsilon", [](RunConfig& c, const std::string& k, const std::string& v) { c.adam_epsilon = need_double(k, v); }},
      {"grad_clip_norm", [](RunConfig& c, const std::string& k, const std::string& v) { c.grad_clip_norm = need_double(k, v); }},
      {"train_frac", [](RunConfig& c, const std::string& k, const std::string& v) { c.train_frac = need_double(k, v); }},
      {"val_frac", [](RunConfig& c, const std::string& k, const std::string& v) { c.val_frac = need_double(k, v); }},
      {"test_frac", [](RunConfig& c, const std::string& k, const std::string& v) { c.test_frac = need_double(k, v); }},
      {"n_patients", [](RunConfig& c, const std::string& k, const std::string& v) { c.n_patients = static_cast<int>(need_int(k, v)); }},
      {"seqs_per_patient", [](RunConfig& c, const std::string& k, const std::string& v) { c.seqs_per_patient = static_cast<int>(need_int(k, v)); }},
      {"classes", [](RunConfig& c, const std::string& k, const std::string& v) { c.classes = static_cast<int>(need_int(k, v)); }},
      {"input_dim", [](RunConfig& c, const std::string& k, const std::string& v) { c.input_dim = static_cast<int>(need_int(k, v)); }},
      {"window_len", [](RunConfig& c, const std::string& k, const std::string& v) { c.window_len = static_cast<int>(need_int(k, v)); }},
      {"noise_std", [](RunConfig& c, const std::string& k, const std::string& v) { c.noise_std = need_double(k, v); }},
      {"missing_frac", [](RunConfig& c, const std::string& k, const std::string& v) { c.missing_frac = need_double(k, v); }},
      {"test_noise_std", [](RunConfig& c, const std::string& k, const std::string& v) { c.test_noise_std = need_double(k, v); }},
      {"test_missing_frac", [](RunConfig& c, const std::string& k, const std::string& v) { c.test_missing_frac = need_double(k, v); }},
      {"lambda_grid", [](RunConfig& c, const std::string&, const std::string& v) { c.lambda_grid = v; }},
      {"n_seeds", [](RunConfig& c, const std::string& k, const std::string& v) { c.n_seeds = static_cast<int>(need_int(k, v)); }},
      {"drift_epsilon", [](RunConfig& c, const std::string& k, const std::string& v) { c.drift_epsilon = need_double(k, v); }},
      {"drift_threshold", [](RunConfig& c, const std::string& k, const std::string& v) { c.drift_threshold = need_double(k, v); }},
      {"plot_sequences", [](RunConfig& c, const std::string& k, const std::string& v) { c.plot_sequences = static_cast<int>(need_int(k, v)); }},
  };
  const auto it = kSetters.find(key);
  if (it == kSetters.end()) fail(ErrorCode::kConfig, "config: unknown key '" + key + "'");
  it->second(*this, key, value);
}

void RunConfig::validate() const {
  if (!model_kind_from_name(model)) {
    fail(ErrorCode::kConfig, "config: model must be gru, lstm, or rcgru, got '" + model + "'");
  }
  train_config().validate();
  split_spec().validate();
  if (n_patients < 3) fail(ErrorCode::kConfig, "config: n_patients must be >= 3");
  if (seqs_per_patient < 1) fail(ErrorCode::kConfig, "config: seqs_per_patient must be >= 1");
  if (classes < 2) fail(ErrorCode::kConfig, "config: classes must be >= 2");
  if (input_dim < 1) fail(ErrorCode::kConfig, "config: input_dim must be >= 1");
  if (window_len < 2) fail(ErrorCode::kConfig, "config: window_len must be >= 2");
  if (noise_std < 0.0) fail(ErrorCode::kConfig, "config: noise_std must be >= 0");
  if (missing_frac < 0.0 || missing_frac >= 1.0) {
    fail(ErrorCode::kConfig, "config: missing_frac must lie in [0, 1)");
  }
  if (test_noise_std < 0.0) fail(ErrorCode::kConfig, "config: test_noise_std must be >= 0");
  if (test_missing_frac < 0.0 || test_missing_frac >= 1.0) {
    fail(ErrorCode::kConfig, "config: test_missing_frac must lie in [0, 1)");
  }
  const auto grid = parsed_lambda_grid();
  for (double l : grid) {
    if (l < 0.0) fail(ErrorCode::kConfig, "config: lambda_grid entries must be >= 0");
  }
  if (n_seeds < 1) fail(ErrorCode::kConfig, "config: n_seeds must be >= 1");
  if (drift_epsilon <= 0.0) fail(ErrorCode::kConfig, "config: drift_epsilon must be > 0");
  if (drift_threshold <= 0.0) fail(ErrorCode::kConfig, "config: drift_threshold must be > 0");
  if (plot_sequences < 1) fail(ErrorCode::kConfig, "config: plot_sequences must be >= 1");
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::kIo, "cannot open config file '" + path + "'");
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::kConfig, "config: line " + std::to_string(line_no) +
                                   " is not 'key = value': '" + std::string(stripped) + "'");
    }
    cfg.set(std::string(trim(stripped.substr(0, eq))),
            std::string(trim(stripped.substr(eq + 1))));
  }
  return cfg;
}

ModelKind RunConfig::model_kind() const {
  const auto kind = model_kind_from_name(model);
  if (!kind) fail(ErrorCode::kConfig, "config: unknown model '" + model + "'");
  return *kind;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.learning_rate = learning_rate;
  t.batch_size = batch_size;
  t.lambda = lambda;
  t.hidden_dim = hidden_dim;
  t.max_epochs = max_epochs;
  t.patience = patience;
  t.seed = seed;
  t.adam_beta1 = adam_beta1;
  t.adam_beta2 = adam_beta2;
  t.adam_epsilon = adam_epsilon;
  t.grad_clip_norm = grad_clip_norm;
  return t;
}

SynthConfig RunConfig::synth_config() const {
  SynthConfig s;
  s.n_patients = n_patients;
  s.seqs_per_patient = seqs_per_patient;
  s.num_classes = classes;
  s.input_dim = input_dim;
  s.window_len = window_len;
  s.noise_std = noise_std;
  s.missing_frac = missing_frac;
  return s;
}

SplitSpec RunConfig::split_spec() const {
  SplitSpec spec;
  spec.train_frac = train_frac;
  spec.val_frac = val_frac;
  spec.test_frac = test_frac;
  spec.seed = seed;
  return spec;
}

std::vector<double> RunConfig::parsed_lambda_grid() const {
  std::vector<double> grid;
  for (const auto part : split(lambda_grid, ',')) {
    const auto stripped = trim(part);
    if (stripped.empty()) continue;
    const auto v = parse_double(stripped);
    if (!v) {
      fail(ErrorCode::kConfig,
           "config: bad lambda_grid entry '" + std::string(stripped) + "'");
    }
    grid.push_back(*v);
  }
  if (grid.empty()) fail(ErrorCode::kConfig, "config: lambda_grid is empty");
  return grid;
}

}  // namespace rcgrf
