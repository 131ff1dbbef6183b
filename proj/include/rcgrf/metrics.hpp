#pragma once

#include <iosfwd>

#include "rcgrf/cells.hpp"
#include "rcgrf/data.hpp"

namespace rcgrf {

/// C x C counts; entry (i, j) = true class i predicted as j.
struct ConfusionMatrix {
  Eigen::MatrixXi counts;

  explicit ConfusionMatrix(Index num_classes)
      : counts(Eigen::MatrixXi::Zero(num_classes, num_classes)) {}

  Index num_classes() const { return counts.rows(); }
  long total() const { return counts.sum(); }
  void add(Index truth, Index predicted) { counts(truth, predicted) += 1; }
};

/// Argmax over readout logits per sample; ties break toward the smaller
/// class index.
ConfusionMatrix evaluate(const CellParams& params, const Dataset& data);

/// Macro-averaged metrics; a class with an empty denominator contributes
/// zero to the average.
struct MetricSummary {
  double accuracy = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double f1_macro = 0.0;
};

MetricSummary summarize(const ConfusionMatrix& cm);

/// Fixed key names, values as percentages with one decimal.
void write_metrics(const MetricSummary& summary, std::ostream& os);

void write_confusion_csv(const ConfusionMatrix& cm, std::ostream& os);

}  // namespace rcgrf
