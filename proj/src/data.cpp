#include "rcgrf/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "rcgrf/text.hpp"

namespace rcgrf {

namespace {

// Sub-stream ids hung off the caller's Rng.
constexpr std::uint64_t kMorphStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kMaskStream = 3;

struct PatientMorph {
  Vec amp;       // per-channel amplitude factor
  double phase;  // radians added to every sinusoid
  double shift;  // spike center offset, in steps
};

PatientMorph draw_morph(Rng rng, Index d) {
  PatientMorph m;
  m.amp = Vec(d);
  for (Index j = 0; j < d; ++j) m.amp[j] = 1.0 + 0.35 * rng.normal();
  m.phase = 0.45 * rng.normal();
  m.shift = 3.0 * rng.normal();
  return m;
}

// Class templates share one base rhythm; classes differ by a phase
// offset comparable to the per-patient jitter and by the position and
// sign of a localized spike. Patient-level splits therefore leave a
// genuinely hard residual task instead of a lookup.
double clean_value(int label, int num_classes, Index window, const PatientMorph& m, Index t,
                   Index j) {
  const double tt = static_cast<double>(t);
  const double w = static_cast<double>(window);
  const double class_phase =
      2.0 * std::numbers::pi * static_cast<double>(label) / (2.0 * num_classes);
  const double channel_phase = 1.9 * static_cast<double>(j);
  double v = m.amp[j] * std::sin(2.0 * std::numbers::pi * 2.0 * tt / w + class_phase +
                                 channel_phase + m.phase);
  const double center = w * (0.2 + 0.6 * (label + 0.5) / num_classes) + m.shift;
  const double width = std::max(2.0, w / 12.0);
  const double spike_amp =
      (label % 2 == 0 ? 0.9 : -0.9) * (1.0 + 0.2 * static_cast<double>(j)) * m.amp[j];
  const double z = (tt - center) / width;
  v += spike_amp * std::exp(-0.5 * z * z);
  return v;
}

// Last-observed-value imputation; steps before the first observation
// become zeros.
void impute_locf(std::vector<Vec>& inputs, const std::vector<std::uint8_t>& mask) {
  const Index d = inputs.empty() ? 0 : inputs.front().size();
  Vec last = Vec::Zero(d);
  bool seen = false;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    if (mask[t]) {
      last = inputs[t];
      seen = true;
    } else {
      inputs[t] = seen ? last : Vec(Vec::Zero(d));
    }
  }
}

std::string line_tag(std::size_t line_no) { return " (line " + std::to_string(line_no) + ")"; }

}  // namespace

void SplitSpec::validate() const {
  if (train_frac <= 0.0 || val_frac <= 0.0 || test_frac <= 0.0) {
    fail(ErrorCode::kParameter, "split spec: fractions must be positive");
  }
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9) {
    fail(ErrorCode::kParameter, "split spec: fractions must sum to 1, got " +
                                    format_double(train_frac + val_frac + test_frac));
  }
}

Dataset synth_generate(Rng rng, const SynthConfig& cfg) {
  if (cfg.num_classes < 2) fail(ErrorCode::kParameter, "synth: need at least 2 classes");
  if (cfg.window_len < 2) fail(ErrorCode::kParameter, "synth: window length must be >= 2");
  if (cfg.input_dim < 1) fail(ErrorCode::kParameter, "synth: input dim must be >= 1");
  if (cfg.n_patients < 1 || cfg.seqs_per_patient < 1) {
    fail(ErrorCode::kParameter, "synth: need at least one patient and one sequence per patient");
  }
  if (cfg.noise_std < 0.0) fail(ErrorCode::kParameter, "synth: noise_std must be nonnegative");
  if (cfg.missing_frac < 0.0 || cfg.missing_frac >= 1.0) {
    fail(ErrorCode::kParameter, "synth: missing_frac must lie in [0, 1)");
  }

  Dataset ds;
  ds.num_classes = cfg.num_classes;
  ds.input_dim = cfg.input_dim;
  ds.window_len = cfg.window_len;
  ds.samples.reserve(static_cast<std::size_t>(cfg.n_patients) * cfg.seqs_per_patient);

  const Rng morph_root = rng.split(kMorphStream);
  const Rng noise_root = rng.split(kNoiseStream);
  const Rng mask_root = rng.split(kMaskStream);

  for (int p = 0; p < cfg.n_patients; ++p) {
    const PatientMorph morph = draw_morph(morph_root.split(p), cfg.input_dim);
    char pid[16];
    std::snprintf(pid, sizeof(pid), "P%03d", p);
    for (int s = 0; s < cfg.seqs_per_patient; ++s) {
      const std::uint64_t gidx =
          static_cast<std::uint64_t>(p) * cfg.seqs_per_patient + static_cast<std::uint64_t>(s);
      const int label = static_cast<int>(gidx % cfg.num_classes);

      SequenceSample sample;
      sample.patient_id = pid;
      sample.record_id = std::string(pid) + "R" + std::to_string(s);
      sample.label = label;
      sample.inputs.reserve(cfg.window_len);

      Rng noise = noise_root.split(gidx);
      for (Index t = 0; t < cfg.window_len; ++t) {
        Vec x(cfg.input_dim);
        for (Index j = 0; j < cfg.input_dim; ++j) {
          double v = clean_value(label, cfg.num_classes, cfg.window_len, morph, t, j);
          if (cfg.noise_std > 0.0) v += cfg.noise_std * noise.normal();
          x[j] = v;
        }
        sample.inputs.push_back(std::move(x));
      }

      Rng mask_rng = mask_root.split(gidx);
      sample.mask.assign(cfg.window_len, 1);
      if (cfg.missing_frac > 0.0) {
        for (Index t = 0; t < cfg.window_len; ++t) {
          if (mask_rng.uniform() < cfg.missing_frac) sample.mask[t] = 0;
        }
        impute_locf(sample.inputs, sample.mask);
      }
      ds.samples.push_back(std::move(sample));
    }
  }
  return ds;
}

void write_csv(const Dataset& dataset, std::ostream& os) {
  const Index d = dataset.input_dim;
  const Index window = dataset.window_len;
  os << "patient_id,record_id,label";
  for (Index t = 0; t < window; ++t)
    for (Index j = 0; j < d; ++j) os << ",x_" << t << '_' << j;
  os << '\n';
  for (const SequenceSample& s : dataset.samples) {
    os << s.patient_id << ',' << s.record_id << ',' << s.label;
    for (Index t = 0; t < window; ++t) {
      const bool observed = s.mask.empty() || s.mask[t];
      for (Index j = 0; j < d; ++j) {
        os << ',';
        if (observed) {
          os << format_double(s.inputs[t][j]);
        } else {
          os << "NA";
        }
      }
    }
    os << '\n';
  }
}

void write_csv_file(const Dataset& dataset, const std::string& path) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  write_csv(dataset, os);
  if (!os) fail(ErrorCode::kIo, "write failed for '" + path + "'");
}

Dataset load_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::kIo, "cannot open '" + path + "' for reading");

  std::string line;
  if (!std::getline(is, line)) fail(ErrorCode::kSchema, "'" + path + "': missing header row");
  const auto header = split(trim(line), ',');
  if (header.size() < 4 || header[0] != "patient_id" || header[1] != "record_id" ||
      header[2] != "label") {
    fail(ErrorCode::kSchema,
         "'" + path + "': header must start with patient_id,record_id,label,x_0_0,...");
  }

  // Header encodes d and T via x_<t>_<j> names in time-major order.
  Index window = 0;
  Index d = 0;
  {
    std::vector<std::pair<long long, long long>> coords;
    coords.reserve(header.size() - 3);
    for (std::size_t c = 3; c < header.size(); ++c) {
      const auto name = header[c];
      if (name.size() < 5 || name.substr(0, 2) != "x_") {
        fail(ErrorCode::kSchema, "'" + path + "': bad sample column '" + std::string(name) + "'");
      }
      const auto parts = split(name.substr(2), '_');
      std::optional<long long> t, j;
      if (parts.size() == 2) {
        t = parse_int(parts[0]);
        j = parse_int(parts[1]);
      }
      if (!t || !j || *t < 0 || *j < 0) {
        fail(ErrorCode::kSchema, "'" + path + "': bad sample column '" + std::string(name) + "'");
      }
      coords.emplace_back(*t, *j);
      window = std::max(window, static_cast<Index>(*t + 1));
      d = std::max(d, static_cast<Index>(*j + 1));
    }
    if (static_cast<Index>(coords.size()) != window * d) {
      fail(ErrorCode::kSchema, "'" + path + "': sample columns do not form a full (T x d) grid");
    }
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (coords[i].first != static_cast<long long>(i) / d ||
          coords[i].second != static_cast<long long>(i) % d) {
        fail(ErrorCode::kSchema, "'" + path + "': sample columns must be time-major x_t_j");
      }
    }
  }
  if (window < 2) fail(ErrorCode::kSchema, "'" + path + "': window length must be >= 2");

  Dataset ds;
  ds.input_dim = d;
  ds.window_len = window;

  std::size_t line_no = 1;
  int max_label = -1;
  while (std::getline(is, line)) {
    ++line_no;
    const auto trimmed = trim(line);
    if (trimmed.empty()) continue;
    const auto cells = split(trimmed, ',');
    if (cells.size() != header.size()) {
      fail(ErrorCode::kSchema, "'" + path + "': row has " + std::to_string(cells.size()) +
                                   " columns, header has " + std::to_string(header.size()) +
                                   line_tag(line_no));
    }
    SequenceSample s;
    s.patient_id = std::string(trim(cells[0]));
    s.record_id = std::string(trim(cells[1]));
    if (s.patient_id.empty()) {
      fail(ErrorCode::kParse, "'" + path + "': empty patient_id" + line_tag(line_no));
    }
    const auto label = parse_int(trim(cells[2]));
    if (!label || *label < 0) {
      fail(ErrorCode::kParse, "'" + path + "': bad label '" + std::string(trim(cells[2])) + "'" +
                                  line_tag(line_no));
    }
    s.label = static_cast<int>(*label);
    max_label = std::max(max_label, s.label);

    s.inputs.assign(window, Vec::Zero(d));
    s.mask.assign(window, 1);
    for (Index t = 0; t < window; ++t) {
      int na_count = 0;
      for (Index j = 0; j < d; ++j) {
        const auto cell = trim(cells[3 + static_cast<std::size_t>(t * d + j)]);
        if (cell == "NA") {
          ++na_count;
          continue;
        }
        const auto value = parse_double(cell);
        if (!value) {
          fail(ErrorCode::kParse, "'" + path + "': non-numeric value '" + std::string(cell) +
                                      "' in column x_" + std::to_string(t) + "_" +
                                      std::to_string(j) + line_tag(line_no));
        }
        s.inputs[t][j] = *value;
      }
      if (na_count == d) {
        s.mask[t] = 0;
      } else if (na_count != 0) {
        fail(ErrorCode::kParse, "'" + path + "': step " + std::to_string(t) +
                                    " mixes NA and numeric cells" + line_tag(line_no));
      }
    }
    impute_locf(s.inputs, s.mask);
    ds.samples.push_back(std::move(s));
  }
  ds.num_classes = max_label + 1;
  return ds;
}

Split patient_split(const Dataset& dataset, const SplitSpec& spec) {
  spec.validate();

  std::vector<std::string> patients;  // first-appearance order
  {
    std::set<std::string> seen;
    for (const auto& s : dataset.samples) {
      if (seen.insert(s.patient_id).second) patients.push_back(s.patient_id);
    }
  }
  const std::size_t n = patients.size();
  if (n < 3) {
    fail(ErrorCode::kSplitTooSmall,
         "patient_split: need at least 3 distinct patients, got " + std::to_string(n));
  }

  Rng rng(spec.seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
    std::swap(patients[i], patients[j]);
  }

  const std::size_t n_val = static_cast<std::size_t>(std::floor(n * spec.val_frac));
  const std::size_t n_test = static_cast<std::size_t>(std::floor(n * spec.test_frac));
  const std::size_t n_train = n - n_val - n_test;
  if (n_train == 0 || n_val == 0 || n_test == 0) {
    fail(ErrorCode::kSplitTooSmall, "patient_split: a split would receive zero patients (" +
                                        std::to_string(n_train) + "/" + std::to_string(n_val) +
                                        "/" + std::to_string(n_test) + ")");
  }

  std::map<std::string, int> assignment;  // 0 train, 1 val, 2 test
  for (std::size_t i = 0; i < n; ++i) {
    assignment[patients[i]] = i < n_train ? 0 : (i < n_train + n_val ? 1 : 2);
  }

  Split out;
  Dataset* parts[3] = {&out.train, &out.val, &out.test};
  for (Dataset* part : parts) {
    part->num_classes = dataset.num_classes;
    part->input_dim = dataset.input_dim;
    part->window_len = dataset.window_len;
    part->norm = dataset.norm;
  }
  for (const auto& s : dataset.samples) {
    parts[assignment.at(s.patient_id)]->samples.push_back(s);
  }

  static const char* kNames[3] = {"train", "val", "test"};
  for (int i = 0; i < 3; ++i) {
    std::vector<bool> present(static_cast<std::size_t>(dataset.num_classes), false);
    for (const auto& s : parts[i]->samples) present[static_cast<std::size_t>(s.label)] = true;
    for (int c = 0; c < dataset.num_classes; ++c) {
      if (!present[static_cast<std::size_t>(c)]) {
        fail(ErrorCode::kData, "patient_split: class " + std::to_string(c) +
                                   " missing from the " + kNames[i] + " split");
      }
    }
  }
  return out;
}

NormStats zscore_fit(const Dataset& train) {
  if (train.samples.empty()) fail(ErrorCode::kData, "zscore: training split is empty");
  const Index d = train.input_dim;
  Vec mean = Vec::Zero(d);
  double count = 0.0;
  for (const auto& s : train.samples) {
    for (const Vec& x : s.inputs) {
      mean += x;
      count += 1.0;
    }
  }
  mean /= count;
  Vec var = Vec::Zero(d);
  for (const auto& s : train.samples) {
    for (const Vec& x : s.inputs) var += (x - mean).cwiseAbs2();
  }
  var /= count;  // population convention
  NormStats stats;
  stats.mean = std::move(mean);
  stats.std = var.cwiseSqrt();
  for (Index j = 0; j < d; ++j) {
    if (stats.std[j] <= 1e-12 * std::max(1.0, std::abs(stats.mean[j]))) {
      fail(ErrorCode::kDegenerateFeature,
           "zscore: feature " + std::to_string(j) + " is constant over the training split");
    }
  }
  return stats;
}

void zscore_apply(Dataset& dataset, const NormStats& stats) {
  if (stats.mean.size() != dataset.input_dim || stats.std.size() != dataset.input_dim) {
    fail(ErrorCode::kShape, "zscore: stats dimension does not match dataset");
  }
  for (auto& s : dataset.samples) {
    for (Vec& x : s.inputs) x = (x - stats.mean).cwiseQuotient(stats.std);
  }
  dataset.norm = stats;
}

NormStats zscore_fit_apply(Dataset& train, const std::vector<Dataset*>& others) {
  const NormStats stats = zscore_fit(train);
  zscore_apply(train, stats);
  for (Dataset* other : others) zscore_apply(*other, stats);
  return stats;
}

Dataset corrupt(const Dataset& dataset, Rng rng, double noise_std, double missing_frac) {
  if (noise_std < 0.0) fail(ErrorCode::kParameter, "corrupt: noise_std must be nonnegative");
  if (missing_frac < 0.0 || missing_frac >= 1.0) {
    fail(ErrorCode::kParameter, "corrupt: missing_frac must lie in [0, 1)");
  }
  Dataset out = dataset;
  if (noise_std == 0.0 && missing_frac == 0.0) return out;

  const Rng noise_root = rng.split(kNoiseStream);
  const Rng mask_root = rng.split(kMaskStream);
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    SequenceSample& s = out.samples[i];
    const Index window = s.steps();
    const Index d = s.dim();
    if (s.mask.empty()) s.mask.assign(static_cast<std::size_t>(window), 1);

    if (noise_std > 0.0) {
      Rng noise = noise_root.split(i);
      for (Index t = 0; t < window; ++t) {
        for (Index j = 0; j < d; ++j) {
          const double z = noise.normal();
          if (s.mask[static_cast<std::size_t>(t)]) s.inputs[t][j] += noise_std * z;
        }
      }
    }
    bool masked_more = false;
    if (missing_frac > 0.0) {
      Rng mask_rng = mask_root.split(i);
      for (Index t = 0; t < window; ++t) {
        if (mask_rng.uniform() < missing_frac && s.mask[static_cast<std::size_t>(t)]) {
          s.mask[static_cast<std::size_t>(t)] = 0;
          masked_more = true;
        }
      }
    }
    if (noise_std > 0.0 || masked_more) impute_locf(s.inputs, s.mask);
  }
  return out;
}

}  // namespace rcgrf
