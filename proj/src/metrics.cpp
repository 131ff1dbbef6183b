#include "rcgrf/metrics.hpp"

#include <ostream>
#include <string>

#include "rcgrf/objective.hpp"
#include "rcgrf/text.hpp"

namespace rcgrf {

ConfusionMatrix evaluate(const CellParams& params, const Dataset& data) {
  if (data.input_dim != params.input_dim) {
    fail(ErrorCode::kShape, "evaluate: dataset input dim " + std::to_string(data.input_dim) +
                                " does not match model input dim " +
                                std::to_string(params.input_dim));
  }
  if (data.num_classes > params.num_classes) {
    fail(ErrorCode::kShape, "evaluate: dataset has " + std::to_string(data.num_classes) +
                                " classes, model has " + std::to_string(params.num_classes));
  }
  ConfusionMatrix cm(params.num_classes);
  for (const SequenceSample& s : data.samples) {
    const HiddenTrajectory traj = forward(params, s.inputs);
    const Vec logits = readout_logits(params, traj.last_state());
    Index pred = 0;
    for (Index c = 1; c < logits.size(); ++c) {
      if (logits[c] > logits[pred]) pred = c;  // ties keep the smaller index
    }
    cm.add(s.label, pred);
  }
  return cm;
}

MetricSummary summarize(const ConfusionMatrix& cm) {
  const Index c = cm.num_classes();
  const long total = cm.total();
  if (total <= 0) fail(ErrorCode::kParameter, "summarize: empty confusion matrix");

  MetricSummary out;
  out.accuracy = static_cast<double>(cm.counts.trace()) / static_cast<double>(total);
  double prec_sum = 0.0, rec_sum = 0.0, f1_sum = 0.0;
  for (Index i = 0; i < c; ++i) {
    const double tp = cm.counts(i, i);
    const double pred = cm.counts.col(i).sum();   // tp + fp
    const double actual = cm.counts.row(i).sum(); // tp + fn
    const double precision = pred > 0 ? tp / pred : 0.0;
    const double recall = actual > 0 ? tp / actual : 0.0;
    const double f1 =
        (precision + recall) > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    prec_sum += precision;
    rec_sum += recall;
    f1_sum += f1;
  }
  out.precision_macro = prec_sum / static_cast<double>(c);
  out.recall_macro = rec_sum / static_cast<double>(c);
  out.f1_macro = f1_sum / static_cast<double>(c);
  return out;
}

void write_metrics(const MetricSummary& summary, std::ostream& os) {
  os << "accuracy = " << format_fixed(100.0 * summary.accuracy, 1) << '\n';
  os << "precision_macro = " << format_fixed(100.0 * summary.precision_macro, 1) << '\n';
  os << "recall_macro = " << format_fixed(100.0 * summary.recall_macro, 1) << '\n';
  os << "f1_macro = " << format_fixed(100.0 * summary.f1_macro, 1) << '\n';
}

void write_confusion_csv(const ConfusionMatrix& cm, std::ostream& os) {
  const Index c = cm.num_classes();
  os << "true\\pred";
  for (Index j = 0; j < c; ++j) os << ',' << j;
  os << '\n';
  for (Index i = 0; i < c; ++i) {
    os << i;
    for (Index j = 0; j < c; ++j) os << ',' << cm.counts(i, j);
    os << '\n';
  }
}

}  // namespace rcgrf
