#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "metrics.hpp"
#include "rgcn.hpp"

namespace aml {

struct SingleRunResult {
  MetricsReport test_metrics;
  ModelCheckpoint checkpoint;
  std::vector<EpochStats> history;
};

// One arm of the experiment: generate -> (enrich) -> build -> train ->
// evaluate on the test mask. Deterministic in (config, mode, seed).
SingleRunResult run_single(const ExperimentConfig &config, FeatureMode mode, uint64_t seed);

struct ModeSummary {
  std::vector<MetricsReport> per_seed;
  double mean_accuracy = 0.0;
  double mean_f1 = 0.0;
  double mean_auc = 0.0;
  // Sample standard deviation (n-1); absent with a single seed.
  std::optional<double> std_accuracy, std_f1, std_auc;
};

struct ComparisonResult {
  std::vector<uint64_t> seeds;
  ModeSummary synthetic;
  ModeSummary hybrid;
  double delta_accuracy = 0.0;  // hybrid mean - synthetic mean
  double delta_f1 = 0.0;
  double delta_auc = 0.0;
  std::vector<std::string> warnings;
};

// Called after each finished arm; cmd_compare uses it to write per-seed
// reports without holding every checkpoint in memory.
using ArmObserver = std::function<void(FeatureMode, uint64_t, const SingleRunResult &)>;

// Both arms over every seed, reusing one generated dataset per seed.
ComparisonResult run_compare(const ExperimentConfig &config, const ArmObserver &observer = {});

nlohmann::json single_report_json(const ExperimentConfig &config, FeatureMode mode, uint64_t seed,
                                  const SingleRunResult &result, const std::string &timestamp);
nlohmann::json comparison_json(const ExperimentConfig &config, const ComparisonResult &result,
                               const std::string &timestamp);

// Fixed-width table: one row per mode plus the delta row; cells are
// mean +- std as percentages with 2 decimals, '-' when std is undefined.
std::string emit_table(const ComparisonResult &result);

std::string current_timestamp_utc();

// CLI-level commands. Paths come from the command line; out_dir overrides the
// config's output_dir when non-empty.

void cmd_generate(const ExperimentConfig &config, const std::filesystem::path &out_dir);

SingleRunResult cmd_train(const ExperimentConfig &config, FeatureMode mode, uint64_t seed,
                          const std::filesystem::path &out_dir);

MetricsReport cmd_evaluate(const std::filesystem::path &model_path,
                           const std::filesystem::path &data_dir,
                           const std::filesystem::path &report_path);

ComparisonResult cmd_compare(const ExperimentConfig &config, const std::filesystem::path &out_dir);

// The --assert-delta CI gate; reports are written before this runs.
void assert_delta_gate(const ComparisonResult &result, double min_delta);

}  // namespace aml
