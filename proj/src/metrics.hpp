#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace aml {

struct Confusion {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t tn = 0;
  int64_t fn = 0;
  int64_t total() const { return tp + fp + tn + fn; }
};

struct Prf {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Exact Mann-Whitney AUC as a ratio of integers. num2 counts each concordant
// (positive scored above negative) pair twice and each tied pair once;
// den2 = 2 * n_pos * n_neg. value() equals the trapezoidal area under the
// ROC curve and is deliberately not clamped: worse-than-chance rankings
// produce values below 0.5.
struct AucExact {
  uint64_t num2 = 0;
  uint64_t den2 = 0;
  double value() const { return static_cast<double>(num2) / static_cast<double>(den2); }
};

// Predict positive iff prob >= threshold (ties at the threshold are positive).
Confusion confusion(std::span<const double> probs, std::span<const int8_t> labels,
                    double threshold);

// accuracy/precision/recall/F1 with the 0/0 -> 0 convention for degenerate
// confusion tables.
Prf prf1(const Confusion &c);

AucExact roc_auc_exact(std::span<const double> scores, std::span<const int8_t> labels);
double roc_auc(std::span<const double> scores, std::span<const int8_t> labels);

// Confusion counts, rates, and AUC in one record plus the run metadata the
// experiment harness stamps on it.
struct MetricsReport {
  Confusion counts;
  Prf rates;
  double auc = 0.0;
  double threshold = 0.5;
  int64_t n_pos = 0;
  int64_t n_neg = 0;
  std::string mode;
  uint64_t seed = 0;
  int32_t epochs = 0;
  int32_t best_epoch = 0;
};

MetricsReport evaluate_predictions(std::span<const double> probs, std::span<const int8_t> labels,
                                   double threshold = 0.5);

}  // namespace aml
