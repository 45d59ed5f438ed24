#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "amlhybrid/aml.h"

namespace {

struct ExperimentCloser {
  void operator()(aml_experiment *exp) const { aml_experiment_close(exp); }
};
using ExperimentHandle = std::unique_ptr<aml_experiment, ExperimentCloser>;

ExperimentHandle open_experiment(const std::string &config_path) {
  return ExperimentHandle(aml_experiment_open(config_path.c_str()));
}

int fail_with_last_error() {
  std::fprintf(stderr, "error: %s\n", aml_last_error());
  // aml_experiment_open reports the cause through aml_last_error but returns
  // no status; opening only fails on config problems.
  return AML_E_CONFIG;
}

int report_status(aml_status status) {
  if (status != AML_OK) {
    std::fprintf(stderr, "error: %s\n", aml_last_error());
  }
  return status;
}

void print_metrics(const aml_metrics &m) {
  std::printf("accuracy %.4f  precision %.4f  recall %.4f  f1 %.4f  auc %.4f\n", m.accuracy,
              m.precision, m.recall, m.f1, m.auc);
  std::printf("confusion tp %lld fp %lld tn %lld fn %lld\n", static_cast<long long>(m.tp),
              static_cast<long long>(m.fp), static_cast<long long>(m.tn),
              static_cast<long long>(m.fn));
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Synthetic AML transaction graphs: generation, enrichment, and RGCN experiments"};
  app.set_version_flag("--version", aml_version());
  app.require_subcommand(1);

  std::string config_path, out_dir, mode, model_path, data_dir, report_path;
  uint64_t seed = 0;
  double assert_delta = -1.0;

  CLI::App *generate = app.add_subcommand("generate", "Write a synthetic dataset (CSV)");
  generate->add_option("--config", config_path, "Experiment config JSON")->required();
  generate->add_option("--out", out_dir, "Output directory (default: config output_dir)");

  CLI::App *train = app.add_subcommand("train", "Train one arm and write report + model");
  train->add_option("--config", config_path, "Experiment config JSON")->required();
  train->add_option("--mode", mode, "Feature mode: synthetic or hybrid")->required();
  train->add_option("--seed", seed, "Run seed")->required();
  train->add_option("--out", out_dir, "Output directory (default: config output_dir)");

  CLI::App *evaluate = app.add_subcommand("evaluate", "Score a dataset with a saved model");
  evaluate->add_option("--model", model_path, "Model checkpoint JSON")->required();
  evaluate->add_option("--data", data_dir, "Directory with accounts.csv and transactions.csv")
      ->required();
  evaluate->add_option("--out", report_path, "Report JSON path")->required();

  CLI::App *compare = app.add_subcommand("compare", "Run the synthetic-vs-hybrid comparison");
  compare->add_option("--config", config_path, "Experiment config JSON")->required();
  compare->add_option("--out", out_dir, "Output directory (default: config output_dir)");
  compare->add_option("--assert-delta", assert_delta,
                      "Fail (exit 5) when mean AUC delta falls below this value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return AML_E_CONFIG;
  }

  if (generate->parsed()) {
    const ExperimentHandle exp = open_experiment(config_path);
    if (!exp) {
      return fail_with_last_error();
    }
    const aml_status status = aml_generate(exp.get(), out_dir.c_str());
    if (status == AML_OK) {
      std::printf("wrote accounts.csv and transactions.csv\n");
    }
    return report_status(status);
  }

  if (train->parsed()) {
    const ExperimentHandle exp = open_experiment(config_path);
    if (!exp) {
      return fail_with_last_error();
    }
    aml_metrics metrics{};
    const aml_status status = aml_train(exp.get(), mode.c_str(), seed, out_dir.c_str(), &metrics);
    if (status == AML_OK) {
      std::printf("test metrics (%s, seed %llu)\n", mode.c_str(),
                  static_cast<unsigned long long>(seed));
      print_metrics(metrics);
    }
    return report_status(status);
  }

  if (evaluate->parsed()) {
    aml_metrics metrics{};
    const aml_status status =
        aml_evaluate(model_path.c_str(), data_dir.c_str(), report_path.c_str(), &metrics);
    if (status == AML_OK) {
      print_metrics(metrics);
    }
    return report_status(status);
  }

  if (compare->parsed()) {
    const ExperimentHandle exp = open_experiment(config_path);
    if (!exp) {
      return fail_with_last_error();
    }
    const aml_status status = aml_compare(exp.get(), out_dir.c_str(), assert_delta);
    // The table is available even when the assert gate failed.
    if (status == AML_OK || status == AML_E_ASSERT) {
      std::fputs(aml_comparison_table(exp.get()), stdout);
    }
    return report_status(status);
  }

  return AML_E_CONFIG;
}
