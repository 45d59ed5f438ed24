#include <doctest.h>

#include <json.hpp>

#include <cctype>
#include <filesystem>
#include <regex>
#include <string>
#include <vector>

#include "config.hpp"
#include "error.hpp"
#include "harness.hpp"
#include "io.hpp"
#include "support.hpp"
#include "version.hpp"

using namespace aml;
using amltest::TempDir;
using amltest::repo_file;

namespace {

// Four fixture-covered countries, 200 transactions, 5 epochs: enough to walk
// the full pipeline in well under a second.
ExperimentConfig tiny_config() {
  nlohmann::json doc = {
      {"generator",
       {{"countries", {"DE", "FR", "GB", "SG"}},
        {"n_accounts", 60},
        {"n_transactions", 200},
        {"n_banks", 3}}},
      {"model", {{"epochs", 5}, {"hidden_dim", 8}}},
      {"seeds", {1, 2}},
  };
  ExperimentConfig cfg = parse_experiment_config(doc.dump(), "tiny");
  cfg.indicators_path = repo_file("data/country_indicators.csv");
  return cfg;
}

nlohmann::json parse_file(const std::filesystem::path &p) {
  return nlohmann::json::parse(io::read_file(p));
}

}  // namespace

TEST_CASE("run_single walks the pipeline end to end") {
  ExperimentConfig cfg = tiny_config();
  for (FeatureMode mode : {FeatureMode::synthetic, FeatureMode::hybrid}) {
    SingleRunResult r = run_single(cfg, mode, 1);
    CHECK(r.history.size() == 5);
    CHECK(r.test_metrics.mode == feature_mode_name(mode));
    CHECK(r.test_metrics.seed == 1);
    CHECK(r.test_metrics.epochs == 5);
    CHECK(r.test_metrics.best_epoch >= 1);
    CHECK(r.test_metrics.best_epoch <= 5);
    // 200 transactions at 0.7/0.15/0.15 put 30 in the test split, give or
    // take one per class from the per-class rounding.
    CHECK(r.test_metrics.counts.total() >= 28);
    CHECK(r.test_metrics.counts.total() <= 32);
    CHECK(r.test_metrics.n_pos + r.test_metrics.n_neg == r.test_metrics.counts.total());
    CHECK(r.test_metrics.n_pos >= 2);
    // 4 countries + value + 5 types, plus 4 indicators in hybrid mode.
    const size_t expect_width = mode == FeatureMode::hybrid ? 14 : 10;
    CHECK(r.checkpoint.layout.width() == expect_width);
    CHECK(r.checkpoint.seed == 1);
  }
}

TEST_CASE("run_single is deterministic for a fixed seed") {
  ExperimentConfig cfg = tiny_config();
  SingleRunResult a = run_single(cfg, FeatureMode::hybrid, 2);
  SingleRunResult b = run_single(cfg, FeatureMode::hybrid, 2);

  const std::string fixed = "1970-01-01T00:00:00Z";
  CHECK(single_report_json(cfg, FeatureMode::hybrid, 2, a, fixed).dump() ==
        single_report_json(cfg, FeatureMode::hybrid, 2, b, fixed).dump());

  SingleRunResult c = run_single(cfg, FeatureMode::hybrid, 1);
  CHECK(single_report_json(cfg, FeatureMode::hybrid, 1, c, fixed).dump() !=
        single_report_json(cfg, FeatureMode::hybrid, 2, a, fixed).dump());
}

TEST_CASE("hybrid run fails before generation when the indicator file is missing") {
  ExperimentConfig cfg = tiny_config();
  cfg.indicators_path = "/nonexistent/indicators.csv";
  try {
    run_single(cfg, FeatureMode::hybrid, 1);
    FAIL("expected a configuration error");
  } catch (const ConfigError &e) {
    const std::string msg = e.what();
    CHECK(msg.find("stage enrich") != std::string::npos);
    CHECK(msg.find("not found") != std::string::npos);
  }
  // The synthetic arm never touches the table.
  CHECK_NOTHROW(run_single(cfg, FeatureMode::synthetic, 1));
}

TEST_CASE("run_compare pairs the arms over shared data") {
  ExperimentConfig cfg = tiny_config();
  std::vector<std::pair<std::string, uint64_t>> observed;
  ComparisonResult r = run_compare(cfg, [&](FeatureMode mode, uint64_t seed,
                                            const SingleRunResult &arm) {
    observed.emplace_back(feature_mode_name(mode), seed);
    CHECK(arm.history.size() == 5);
  });

  CHECK(r.seeds == std::vector<uint64_t>{1, 2});
  CHECK(r.warnings.empty());
  REQUIRE(r.synthetic.per_seed.size() == 2);
  REQUIRE(r.hybrid.per_seed.size() == 2);
  CHECK(observed ==
        std::vector<std::pair<std::string, uint64_t>>{
            {"synthetic", 1}, {"hybrid", 1}, {"synthetic", 2}, {"hybrid", 2}});

  CHECK(r.delta_auc ==
        doctest::Approx(r.hybrid.mean_auc - r.synthetic.mean_auc).epsilon(1e-12));
  CHECK(r.delta_f1 == doctest::Approx(r.hybrid.mean_f1 - r.synthetic.mean_f1).epsilon(1e-12));
  CHECK(r.delta_accuracy ==
        doctest::Approx(r.hybrid.mean_accuracy - r.synthetic.mean_accuracy).epsilon(1e-12));

  CHECK(r.synthetic.mean_auc ==
        doctest::Approx((r.synthetic.per_seed[0].auc + r.synthetic.per_seed[1].auc) / 2.0));
  CHECK(r.synthetic.std_auc.has_value());

  // The same seed sees the same test-set composition in both arms.
  for (size_t i = 0; i < 2; ++i) {
    CHECK(r.synthetic.per_seed[i].n_pos == r.hybrid.per_seed[i].n_pos);
    CHECK(r.synthetic.per_seed[i].n_neg == r.hybrid.per_seed[i].n_neg);
    CHECK(r.synthetic.per_seed[i].seed == r.hybrid.per_seed[i].seed);
  }
}

TEST_CASE("single-seed comparison warns and reports null stds") {
  ExperimentConfig cfg = tiny_config();
  cfg.seeds = {1};
  ComparisonResult r = run_compare(cfg);
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("single seed") != std::string::npos);
  CHECK_FALSE(r.synthetic.std_auc.has_value());
  CHECK_FALSE(r.hybrid.std_f1.has_value());

  const std::string table = emit_table(r);
  CHECK(table.find("—") != std::string::npos);

  nlohmann::json j = comparison_json(cfg, r, "t");
  CHECK(j["modes"]["synthetic"]["std"]["auc"].is_null());
  CHECK(j["warnings"].size() == 1);
}

TEST_CASE("emit_table renders percentages with two decimals") {
  ComparisonResult r;
  r.seeds = {1, 2};
  r.synthetic.mean_accuracy = 0.6493;
  r.synthetic.mean_f1 = 0.0775;
  r.synthetic.mean_auc = 0.4364;
  r.synthetic.std_accuracy = 0.012;
  r.synthetic.std_f1 = 0.034;
  r.synthetic.std_auc = 0.0561;
  r.hybrid.mean_accuracy = 0.8339;
  r.hybrid.mean_f1 = 0.5937;
  r.hybrid.mean_auc = 0.7463;
  r.hybrid.std_accuracy = 0.009;
  r.hybrid.std_f1 = 0.021;
  r.hybrid.std_auc = 0.0402;
  r.delta_accuracy = r.hybrid.mean_accuracy - r.synthetic.mean_accuracy;
  r.delta_f1 = r.hybrid.mean_f1 - r.synthetic.mean_f1;
  r.delta_auc = r.hybrid.mean_auc - r.synthetic.mean_auc;

  const std::string table = emit_table(r);
  CHECK(table.find("74.63") != std::string::npos);
  CHECK(table.find("43.64") != std::string::npos);
  CHECK(table.find("59.37") != std::string::npos);
  CHECK(table.find("83.39") != std::string::npos);
  CHECK(table.find("+30.99") != std::string::npos);
  CHECK(table.find("mode") == 0);

  // Four lines: header, synthetic, hybrid, delta; no trailing spaces.
  size_t lines = 0;
  for (char c : table) {
    lines += c == '\n';
  }
  CHECK(lines == 4);
  CHECK(table.find(" \n") == std::string::npos);
}

TEST_CASE("table cells round-trip against the JSON report") {
  ExperimentConfig cfg = tiny_config();
  cfg.seeds = {1, 2};
  ComparisonResult r = run_compare(cfg);
  const std::string table = emit_table(r);
  nlohmann::json j = comparison_json(cfg, r, "t");

  // Parse row by row: "<mode> <acc> ± <std> <f1> ± <std> <auc> ± <std>".
  std::regex num(R"([-+]?\d+\.\d{2})");
  auto numbers_in = [&](const std::string &line) {
    std::vector<double> out;
    for (auto it = std::sregex_iterator(line.begin(), line.end(), num);
         it != std::sregex_iterator(); ++it) {
      out.push_back(std::stod(it->str()));
    }
    return out;
  };

  std::vector<std::string> lines;
  size_t start = 0;
  while (start < table.size()) {
    const size_t end = table.find('\n', start);
    lines.push_back(table.substr(start, end - start));
    start = end + 1;
  }
  REQUIRE(lines.size() == 4);

  auto check_mode_row = [&](const std::string &line, const nlohmann::json &summary) {
    auto nums = numbers_in(line);
    REQUIRE(nums.size() == 6);
    CHECK(nums[0] == doctest::Approx(double(summary["mean"]["accuracy"]) * 100.0).epsilon(5e-3));
    CHECK(nums[1] == doctest::Approx(double(summary["std"]["accuracy"]) * 100.0).epsilon(5e-3));
    CHECK(nums[2] == doctest::Approx(double(summary["mean"]["f1"]) * 100.0).epsilon(5e-3));
    CHECK(nums[4] == doctest::Approx(double(summary["mean"]["auc"]) * 100.0).epsilon(5e-3));
  };
  check_mode_row(lines[1], j["modes"]["synthetic"]);
  check_mode_row(lines[2], j["modes"]["hybrid"]);

  auto deltas = numbers_in(lines[3]);
  REQUIRE(deltas.size() == 3);
  CHECK(deltas[2] == doctest::Approx(double(j["delta"]["auc"]) * 100.0).epsilon(5e-3));
}

TEST_CASE("cmd_train writes a report and a loadable checkpoint") {
  ExperimentConfig cfg = tiny_config();
  TempDir dir("harness_train");
  SingleRunResult r = cmd_train(cfg, FeatureMode::hybrid, 1, dir.path());

  nlohmann::json report = parse_file(dir.path() / "report_hybrid_1.json");
  CHECK(report["format"] == "experiment-report");
  CHECK(report["version"] == kVersion);
  CHECK(report["mode"] == "hybrid");
  CHECK(report["seed"] == 1);
  CHECK(report["training"]["history"]["train_loss"].size() == 5);
  CHECK(report["training"]["history"]["val_auc"].size() == 5);
  CHECK(report["test_metrics"]["auc"] == doctest::Approx(r.test_metrics.auc));
  CHECK(report["config"]["generator"]["n_transactions"] == 200);

  ModelCheckpoint back = load_model(dir.path() / "model_hybrid_1.json");
  CHECK(back.layout.mode == FeatureMode::hybrid);
  CHECK(back.seed == 1);
}

TEST_CASE("cmd_train reports are identical across reruns except the timestamp") {
  ExperimentConfig cfg = tiny_config();
  TempDir d1("harness_det1");
  TempDir d2("harness_det2");
  cmd_train(cfg, FeatureMode::synthetic, 2, d1.path());
  cmd_train(cfg, FeatureMode::synthetic, 2, d2.path());

  nlohmann::json a = parse_file(d1.path() / "report_synthetic_2.json");
  nlohmann::json b = parse_file(d2.path() / "report_synthetic_2.json");
  std::regex iso(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z)");
  CHECK(std::regex_match(a["timestamp"].get<std::string>(), iso));
  a.erase("timestamp");
  b.erase("timestamp");
  CHECK(a == b);

  const std::string m1 = io::read_file(d1.path() / "model_synthetic_2.json");
  const std::string m2 = io::read_file(d2.path() / "model_synthetic_2.json");
  CHECK(m1 == m2);
}

TEST_CASE("cmd_generate and cmd_evaluate close the loop") {
  ExperimentConfig cfg = tiny_config();
  TempDir dir("harness_eval");
  const auto data_dir = dir.path() / "data";
  cmd_generate(cfg, data_dir);
  CHECK(std::filesystem::exists(data_dir / "accounts.csv"));
  CHECK(std::filesystem::exists(data_dir / "transactions.csv"));

  cmd_train(cfg, FeatureMode::hybrid, 1, dir.path());
  const auto report_path = dir.path() / "eval.json";
  MetricsReport m = cmd_evaluate(dir.path() / "model_hybrid_1.json", data_dir, report_path);

  // Standalone evaluation scores every transaction in the directory.
  CHECK(m.counts.total() == 200);
  CHECK(m.mode == "hybrid");
  CHECK(m.seed == 1);

  nlohmann::json report = parse_file(report_path);
  CHECK(report["format"] == "evaluation-report");
  CHECK(report["metrics"]["tp"] == m.counts.tp);
  CHECK(report["data_dir"] == data_dir.string());

  CHECK_THROWS_AS(cmd_evaluate(dir.path() / "no_such_model.json", data_dir, report_path),
                  DataError);
}

TEST_CASE("cmd_compare writes machine and human reports") {
  ExperimentConfig cfg = tiny_config();
  TempDir dir("harness_compare");
  ComparisonResult r = cmd_compare(cfg, dir.path());

  for (const char *name : {"report_synthetic_1.json", "report_hybrid_1.json",
                           "report_synthetic_2.json", "report_hybrid_2.json"}) {
    CHECK(std::filesystem::exists(dir.path() / name));
  }
  nlohmann::json cmp = parse_file(dir.path() / "comparison.json");
  CHECK(cmp["format"] == "comparison-report");
  CHECK(cmp["seeds"] == std::vector<uint64_t>{1, 2});
  CHECK(cmp["delta"]["auc"] == doctest::Approx(r.delta_auc));
  CHECK(cmp["modes"]["hybrid"]["per_seed"].size() == 2);

  CHECK(io::read_file(dir.path() / "comparison.txt") == emit_table(r));
}

TEST_CASE("the assert gate fires only below the requested delta") {
  ComparisonResult r;
  r.delta_auc = 0.02;
  CHECK_NOTHROW(assert_delta_gate(r, 0.01));
  CHECK_NOTHROW(assert_delta_gate(r, 0.02));
  CHECK_THROWS_WITH_AS(assert_delta_gate(r, 0.10), doctest::Contains("assertion failed"),
                       AssertionError);
}

TEST_CASE("timestamps are ISO-8601 UTC") {
  std::regex iso(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z)");
  CHECK(std::regex_match(current_timestamp_utc(), iso));
}
