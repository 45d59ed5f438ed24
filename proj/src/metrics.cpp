#include "metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "error.hpp"

namespace aml {

static void check_binary_labels(std::span<const int8_t> labels) {
  for (int8_t y : labels) {
    if (y != 0 && y != 1) {
      throw DataError("input error: labels must be 0 or 1, got " + std::to_string(int(y)));
    }
  }
}

Confusion confusion(std::span<const double> probs, std::span<const int8_t> labels,
                    double threshold) {
  if (probs.size() != labels.size()) {
    throw DataError("input error: " + std::to_string(probs.size()) + " scores vs " +
                    std::to_string(labels.size()) + " labels");
  }
  check_binary_labels(labels);
  Confusion c;
  for (size_t i = 0; i < probs.size(); ++i) {
    bool predicted_bad = probs[i] >= threshold;
    if (labels[i] == 1) {
      predicted_bad ? ++c.tp : ++c.fn;
    } else {
      predicted_bad ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

Prf prf1(const Confusion &c) {
  if (c.tp < 0 || c.fp < 0 || c.tn < 0 || c.fn < 0) {
    throw DataError("input error: negative confusion count");
  }
  const int64_t total = c.total();
  if (total == 0) {
    throw DataError("input error: empty confusion table");
  }
  Prf out;
  out.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
  out.precision = (c.tp + c.fp) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
  out.recall = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  out.f1 = (out.precision + out.recall) > 0.0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

AucExact roc_auc_exact(std::span<const double> scores, std::span<const int8_t> labels) {
  if (scores.size() != labels.size()) {
    throw DataError("input error: " + std::to_string(scores.size()) + " scores vs " +
                    std::to_string(labels.size()) + " labels");
  }
  check_binary_labels(labels);
  uint64_t n_pos = 0;
  for (int8_t y : labels) {
    n_pos += (y == 1);
  }
  const uint64_t n = scores.size();
  const uint64_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw DataError("evaluation error: AUC undefined for single-class labels");
  }

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  // Walk tie groups in increasing score order. A positive beats every
  // negative strictly below its group and half-ties within it.
  uint64_t wins = 0, tie_pairs = 0, negs_below = 0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    uint64_t group_pos = 0, group_neg = 0;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1) ? ++group_pos : ++group_neg;
      ++j;
    }
    wins += group_pos * negs_below;
    tie_pairs += group_pos * group_neg;
    negs_below += group_neg;
    i = j;
  }

  AucExact out;
  out.num2 = 2 * wins + tie_pairs;
  out.den2 = 2 * n_pos * n_neg;
  return out;
}

double roc_auc(std::span<const double> scores, std::span<const int8_t> labels) {
  return roc_auc_exact(scores, labels).value();
}

MetricsReport evaluate_predictions(std::span<const double> probs, std::span<const int8_t> labels,
                                   double threshold) {
  MetricsReport report;
  report.counts = confusion(probs, labels, threshold);
  report.rates = prf1(report.counts);
  report.auc = roc_auc(probs, labels);
  report.threshold = threshold;
  report.n_pos = report.counts.tp + report.counts.fn;
  report.n_neg = report.counts.tn + report.counts.fp;
  return report;
}

}  // namespace aml
