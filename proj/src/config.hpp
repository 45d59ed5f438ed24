#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "datagen.hpp"
#include "graphbuild.hpp"
#include "rgcn.hpp"

namespace aml {

enum class RunMode { synthetic, hybrid, both };

const char *run_mode_name(RunMode m);
RunMode run_mode_from_name(const std::string &name);

struct ExperimentConfig {
  GenConfig generator = default_gen_config();
  std::filesystem::path indicators_path = "data/country_indicators.csv";
  RunMode mode = RunMode::both;
  SplitConfig split;
  ModelConfig model;
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
  std::filesystem::path output_dir = "out";

  void validate() const;
};

// Strict parse: unknown keys are rejected with their JSON path; omitted keys
// take defaults. `origin` names the source in error messages.
ExperimentConfig parse_experiment_config(const std::string &text, const std::string &origin);
ExperimentConfig load_experiment_config(const std::filesystem::path &path);

// Effective configuration (defaults resolved) as written into every report.
nlohmann::json experiment_config_to_json(const ExperimentConfig &config);

}  // namespace aml
