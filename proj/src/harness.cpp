#include "harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <span>

#include "error.hpp"
#include "io.hpp"
#include "rng.hpp"
#include "version.hpp"

namespace aml {

namespace {

template <typename Fn>
auto stage(const char *name, Fn &&fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error &e) {
    rethrow_tagged(e, std::string("stage ") + name);
  }
}

NormalizedIndicators load_normalized_indicators(const ExperimentConfig &config) {
  if (!std::filesystem::exists(config.indicators_path)) {
    throw ConfigError("configuration error: indicator file '" + config.indicators_path.string() +
                      "' not found");
  }
  return normalize_indicators(load_country_indicators(config.indicators_path));
}

struct PreparedData {
  std::vector<AccountRecord> accounts;
  std::vector<TransactionRecord> transactions;
  std::optional<NormalizedIndicators> indicators;
};

// Indicators load first so a broken hybrid setup fails before any generation
// work happens.
PreparedData prepare_data(const ExperimentConfig &config, bool needs_indicators, uint64_t seed) {
  PreparedData data;
  if (needs_indicators) {
    data.indicators = stage("enrich", [&] { return load_normalized_indicators(config); });
  }
  stage("generate", [&] {
    GenConfig gen = config.generator;
    gen.rng_seed = seed;
    data.accounts = generate_accounts(gen);
    data.transactions = generate_transactions(data.accounts, gen);
    return 0;
  });
  return data;
}

SingleRunResult run_on_graph(const ExperimentConfig &config, const RelGraph &graph,
                             FeatureMode mode, uint64_t seed) {
  const TrainResult trained = stage(
      "train", [&] { return train(graph, config.model, mix_seed(seed, rng_tag::model_init)); });

  SingleRunResult result;
  result.test_metrics = stage("evaluate", [&] {
    const std::vector<double> probs = predict(graph, trained.params, config.model);
    std::vector<double> test_probs;
    std::vector<int8_t> test_labels;
    for (int64_t i = 0; i < graph.n_transactions; ++i) {
      const size_t node = static_cast<size_t>(graph.n_accounts + i);
      if (graph.test_mask[node]) {
        test_probs.push_back(probs[static_cast<size_t>(i)]);
        test_labels.push_back(graph.labels[node]);
      }
    }
    MetricsReport report = evaluate_predictions(test_probs, test_labels);
    report.mode = feature_mode_name(mode);
    report.seed = seed;
    report.epochs = config.model.epochs;
    report.best_epoch = trained.best_epoch;
    return report;
  });
  result.checkpoint = {trained.params, config.model, graph.layout, seed};
  result.history = trained.history;
  return result;
}

double mean_of(std::span<const double> xs) {
  double acc = 0.0;
  for (double x : xs) {
    acc += x;
  }
  return acc / static_cast<double>(xs.size());
}

std::optional<double> sample_std(std::span<const double> xs) {
  if (xs.size() < 2) {
    return std::nullopt;
  }
  const double mean = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) {
    acc += (x - mean) * (x - mean);
  }
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

ModeSummary summarize(std::vector<MetricsReport> per_seed) {
  std::vector<double> acc, f1, auc;
  for (const auto &m : per_seed) {
    acc.push_back(m.rates.accuracy);
    f1.push_back(m.rates.f1);
    auc.push_back(m.auc);
  }
  ModeSummary s;
  s.per_seed = std::move(per_seed);
  s.mean_accuracy = mean_of(acc);
  s.mean_f1 = mean_of(f1);
  s.mean_auc = mean_of(auc);
  s.std_accuracy = sample_std(acc);
  s.std_f1 = sample_std(f1);
  s.std_auc = sample_std(auc);
  return s;
}

nlohmann::json metrics_to_json(const MetricsReport &m) {
  return {{"mode", m.mode},
          {"seed", m.seed},
          {"threshold", m.threshold},
          {"tp", m.counts.tp},
          {"fp", m.counts.fp},
          {"tn", m.counts.tn},
          {"fn", m.counts.fn},
          {"n_pos", m.n_pos},
          {"n_neg", m.n_neg},
          {"accuracy", m.rates.accuracy},
          {"precision", m.rates.precision},
          {"recall", m.rates.recall},
          {"f1", m.rates.f1},
          {"auc", m.auc},
          {"epochs", m.epochs},
          {"best_epoch", m.best_epoch}};
}

nlohmann::json summary_to_json(const ModeSummary &s) {
  nlohmann::json per_seed = nlohmann::json::array();
  for (const auto &m : s.per_seed) {
    per_seed.push_back(metrics_to_json(m));
  }
  auto opt = [](const std::optional<double> &v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {{"per_seed", per_seed},
          {"mean", {{"accuracy", s.mean_accuracy}, {"f1", s.mean_f1}, {"auc", s.mean_auc}}},
          {"std",
           {{"accuracy", opt(s.std_accuracy)},
            {"f1", opt(s.std_f1)},
            {"auc", opt(s.std_auc)}}}};
}

std::filesystem::path resolve_out_dir(const ExperimentConfig &config,
                                      const std::filesystem::path &out_dir) {
  return out_dir.empty() ? config.output_dir : out_dir;
}

void ensure_dir(const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw DataError("I/O error: cannot create directory '" + dir.string() + "': " + ec.message());
  }
}

}  // namespace

SingleRunResult run_single(const ExperimentConfig &config, FeatureMode mode, uint64_t seed) {
  config.validate();
  const PreparedData data = prepare_data(config, mode == FeatureMode::hybrid, seed);
  const RelGraph graph = stage("build", [&] {
    return build_graph(data.accounts, data.transactions, mode,
                       data.indicators ? &*data.indicators : nullptr, config.split, seed);
  });
  return run_on_graph(config, graph, mode, seed);
}

ComparisonResult run_compare(const ExperimentConfig &config, const ArmObserver &observer) {
  config.validate();
  ComparisonResult result;
  result.seeds = config.seeds;
  if (config.seeds.size() < 2) {
    result.warnings.push_back(
        "single seed: sample standard deviations are undefined and reported as null");
  }

  std::vector<MetricsReport> synthetic_metrics, hybrid_metrics;
  for (const uint64_t seed : config.seeds) {
    const PreparedData data = prepare_data(config, /*needs_indicators=*/true, seed);
    const RelGraph g_syn = stage("build", [&] {
      return build_graph(data.accounts, data.transactions, FeatureMode::synthetic, nullptr,
                         config.split, seed);
    });
    const RelGraph g_hyb = stage("build", [&] {
      return build_graph(data.accounts, data.transactions, FeatureMode::hybrid,
                         &*data.indicators, config.split, seed);
    });
    if (g_syn.train_mask != g_hyb.train_mask || g_syn.val_mask != g_hyb.val_mask ||
        g_syn.test_mask != g_hyb.test_mask || g_syn.labels != g_hyb.labels) {
      throw InternalError("internal-consistency error: arms disagree on labels or masks for seed " +
                          std::to_string(seed));
    }

    SingleRunResult syn = run_on_graph(config, g_syn, FeatureMode::synthetic, seed);
    if (observer) {
      observer(FeatureMode::synthetic, seed, syn);
    }
    synthetic_metrics.push_back(std::move(syn.test_metrics));

    SingleRunResult hyb = run_on_graph(config, g_hyb, FeatureMode::hybrid, seed);
    if (observer) {
      observer(FeatureMode::hybrid, seed, hyb);
    }
    hybrid_metrics.push_back(std::move(hyb.test_metrics));
  }

  result.synthetic = summarize(std::move(synthetic_metrics));
  result.hybrid = summarize(std::move(hybrid_metrics));
  result.delta_accuracy = result.hybrid.mean_accuracy - result.synthetic.mean_accuracy;
  result.delta_f1 = result.hybrid.mean_f1 - result.synthetic.mean_f1;
  result.delta_auc = result.hybrid.mean_auc - result.synthetic.mean_auc;
  return result;
}

std::string current_timestamp_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json single_report_json(const ExperimentConfig &config, FeatureMode mode, uint64_t seed,
                                  const SingleRunResult &result, const std::string &timestamp) {
  nlohmann::json train_loss = nlohmann::json::array();
  nlohmann::json val_loss = nlohmann::json::array();
  nlohmann::json val_auc = nlohmann::json::array();
  for (const auto &row : result.history) {
    train_loss.push_back(row.train_loss);
    val_loss.push_back(row.val_loss);
    val_auc.push_back(row.val_auc ? nlohmann::json(*row.val_auc) : nlohmann::json(nullptr));
  }
  return {{"format", "experiment-report"},
          {"version", kVersion},
          {"timestamp", timestamp},
          {"mode", feature_mode_name(mode)},
          {"seed", seed},
          {"config", experiment_config_to_json(config)},
          {"training",
           {{"best_epoch", result.test_metrics.best_epoch},
            {"history",
             {{"train_loss", train_loss}, {"val_loss", val_loss}, {"val_auc", val_auc}}}}},
          {"test_metrics", metrics_to_json(result.test_metrics)}};
}

nlohmann::json comparison_json(const ExperimentConfig &config, const ComparisonResult &result,
                               const std::string &timestamp) {
  return {{"format", "comparison-report"},
          {"version", kVersion},
          {"timestamp", timestamp},
          {"config", experiment_config_to_json(config)},
          {"seeds", result.seeds},
          {"warnings", result.warnings},
          {"modes",
           {{"synthetic", summary_to_json(result.synthetic)},
            {"hybrid", summary_to_json(result.hybrid)}}},
          {"delta",
           {{"accuracy", result.delta_accuracy},
            {"f1", result.delta_f1},
            {"auc", result.delta_auc}}}};
}

namespace {

// Pads by display width; the em dash is 3 bytes but 1 column.
std::string pad_cell(std::string cell, size_t width) {
  size_t display = cell.size();
  size_t pos = 0;
  while ((pos = cell.find("—", pos)) != std::string::npos) {
    display -= 2;
    pos += 3;
  }
  if (display < width) {
    cell.append(width - display, ' ');
  }
  return cell;
}

std::string mean_std_cell(double mean, const std::optional<double> &sd) {
  char buf[64];
  if (sd) {
    std::snprintf(buf, sizeof(buf), "%6.2f ± %5.2f", mean * 100.0, *sd * 100.0);
  } else {
    std::snprintf(buf, sizeof(buf), "%6.2f ± %5s", mean * 100.0, "—");
  }
  return buf;
}

std::string delta_cell(double delta) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%+6.2f", delta * 100.0);
  return buf;
}

}  // namespace

std::string emit_table(const ComparisonResult &result) {
  constexpr size_t kModeWidth = 11;
  constexpr size_t kCellWidth = 17;
  std::string out;
  auto row = [&](const std::string &mode, const std::string &a, const std::string &f,
                 const std::string &u) {
    out += pad_cell(mode, kModeWidth);
    out += pad_cell(a, kCellWidth);
    out += pad_cell(f, kCellWidth);
    // Last column unpadded to avoid trailing spaces.
    out += u;
    out += '\n';
  };
  row("mode", "accuracy", "f1", "auc");
  row("synthetic", mean_std_cell(result.synthetic.mean_accuracy, result.synthetic.std_accuracy),
      mean_std_cell(result.synthetic.mean_f1, result.synthetic.std_f1),
      mean_std_cell(result.synthetic.mean_auc, result.synthetic.std_auc));
  row("hybrid", mean_std_cell(result.hybrid.mean_accuracy, result.hybrid.std_accuracy),
      mean_std_cell(result.hybrid.mean_f1, result.hybrid.std_f1),
      mean_std_cell(result.hybrid.mean_auc, result.hybrid.std_auc));
  row("delta", delta_cell(result.delta_accuracy), delta_cell(result.delta_f1),
      delta_cell(result.delta_auc));
  return out;
}

void cmd_generate(const ExperimentConfig &config, const std::filesystem::path &out_dir) {
  config.validate();
  const auto dir = resolve_out_dir(config, out_dir);
  stage("generate", [&] {
    const auto accounts = generate_accounts(config.generator);
    const auto transactions = generate_transactions(accounts, config.generator);
    write_dataset(accounts, transactions, dir);
    return 0;
  });
}

SingleRunResult cmd_train(const ExperimentConfig &config, FeatureMode mode, uint64_t seed,
                          const std::filesystem::path &out_dir) {
  SingleRunResult result = run_single(config, mode, seed);
  const auto dir = resolve_out_dir(config, out_dir);
  ensure_dir(dir);
  const std::string suffix = std::string(feature_mode_name(mode)) + "_" + std::to_string(seed);
  const nlohmann::json report =
      single_report_json(config, mode, seed, result, current_timestamp_utc());
  io::atomic_write_file(dir / ("report_" + suffix + ".json"), report.dump(2) + "\n");
  save_model(result.checkpoint, dir / ("model_" + suffix + ".json"));
  return result;
}

MetricsReport cmd_evaluate(const std::filesystem::path &model_path,
                           const std::filesystem::path &data_dir,
                           const std::filesystem::path &report_path) {
  const ModelCheckpoint ckpt = stage("load", [&] { return load_model(model_path); });
  const MetricsReport metrics = stage("evaluate", [&] {
    const Dataset ds = read_dataset(data_dir);
    const RelGraph graph = build_graph_with_layout(ds.accounts, ds.transactions, ckpt.layout);
    const std::vector<double> probs = predict(graph, ckpt.params, ckpt.config);
    std::vector<int8_t> labels(probs.size());
    for (int64_t i = 0; i < graph.n_transactions; ++i) {
      labels[static_cast<size_t>(i)] = graph.labels[static_cast<size_t>(graph.n_accounts + i)];
    }
    MetricsReport m = evaluate_predictions(probs, labels);
    m.mode = feature_mode_name(ckpt.layout.mode);
    m.seed = ckpt.seed;
    m.epochs = ckpt.config.epochs;
    return m;
  });

  nlohmann::json j = {{"format", "evaluation-report"},
                      {"version", kVersion},
                      {"timestamp", current_timestamp_utc()},
                      {"model", model_path.string()},
                      {"data_dir", data_dir.string()},
                      {"metrics", metrics_to_json(metrics)}};
  if (report_path.has_parent_path()) {
    ensure_dir(report_path.parent_path());
  }
  io::atomic_write_file(report_path, j.dump(2) + "\n");
  return metrics;
}

ComparisonResult cmd_compare(const ExperimentConfig &config, const std::filesystem::path &out_dir) {
  config.validate();
  const auto dir = resolve_out_dir(config, out_dir);
  ensure_dir(dir);

  const ArmObserver write_arm_report = [&](FeatureMode mode, uint64_t seed,
                                           const SingleRunResult &arm) {
    const std::string suffix = std::string(feature_mode_name(mode)) + "_" + std::to_string(seed);
    const nlohmann::json report =
        single_report_json(config, mode, seed, arm, current_timestamp_utc());
    io::atomic_write_file(dir / ("report_" + suffix + ".json"), report.dump(2) + "\n");
  };

  const ComparisonResult result = run_compare(config, write_arm_report);
  const nlohmann::json j = comparison_json(config, result, current_timestamp_utc());
  io::atomic_write_file(dir / "comparison.json", j.dump(2) + "\n");
  io::atomic_write_file(dir / "comparison.txt", emit_table(result));
  return result;
}

void assert_delta_gate(const ComparisonResult &result, double min_delta) {
  if (result.delta_auc < min_delta) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "assertion failed: mean AUC delta %.4f is below the required %.4f",
                  result.delta_auc, min_delta);
    throw AssertionError(buf);
  }
}

}  // namespace aml
