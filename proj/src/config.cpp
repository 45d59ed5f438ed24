#include "config.hpp"

#include <cmath>
#include <initializer_list>
#include <unordered_set>

#include "error.hpp"
#include "io.hpp"

namespace aml {

const char *run_mode_name(RunMode m) {
  switch (m) {
    case RunMode::synthetic: return "synthetic";
    case RunMode::hybrid: return "hybrid";
    case RunMode::both: return "both";
  }
  throw InternalError("internal-consistency error: invalid run mode value");
}

RunMode run_mode_from_name(const std::string &name) {
  if (name == "synthetic") {
    return RunMode::synthetic;
  }
  if (name == "hybrid") {
    return RunMode::hybrid;
  }
  if (name == "both") {
    return RunMode::both;
  }
  throw ConfigError("configuration error: unknown mode '" + name +
                    "', expected 'synthetic', 'hybrid', or 'both'");
}

void ExperimentConfig::validate() const {
  generator.validate();
  split.validate();
  model.validate();
  if (seeds.empty()) {
    throw ConfigError("configuration error: seed list is empty");
  }
  std::unordered_set<uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) {
    throw ConfigError("configuration error: duplicate seeds in seed list");
  }
  if (indicators_path.empty()) {
    throw ConfigError("configuration error: indicators_path is empty");
  }
  if (output_dir.empty()) {
    throw ConfigError("configuration error: output_dir is empty");
  }
}

namespace {

void reject_unknown_keys(const nlohmann::json &obj, const std::string &path,
                         std::initializer_list<const char *> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char *key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("configuration error: unknown key '" + it.key() + "' in " + path);
    }
  }
}

const nlohmann::json *get_if(const nlohmann::json &obj, const char *key) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double as_number(const nlohmann::json &v, const std::string &path) {
  if (!v.is_number()) {
    throw ConfigError("configuration error: " + path + " must be a number");
  }
  return v.get<double>();
}

int64_t as_integer(const nlohmann::json &v, const std::string &path) {
  if (!v.is_number_integer()) {
    throw ConfigError("configuration error: " + path + " must be an integer");
  }
  return v.get<int64_t>();
}

std::string as_string(const nlohmann::json &v, const std::string &path) {
  if (!v.is_string()) {
    throw ConfigError("configuration error: " + path + " must be a string");
  }
  return v.get<std::string>();
}

std::vector<double> as_number_array(const nlohmann::json &v, const std::string &path) {
  if (!v.is_array()) {
    throw ConfigError("configuration error: " + path + " must be an array of numbers");
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void parse_risk(const nlohmann::json &j, GenConfig &gen) {
  reject_unknown_keys(j, "'generator.risk'", {"country_risk", "value_coef", "type_coefs", "intercept"});
  if (const auto *v = get_if(j, "country_risk")) {
    gen.risk.country_risk = as_number_array(*v, "generator.risk.country_risk");
  }
  if (const auto *v = get_if(j, "value_coef")) {
    gen.risk.value_coef = as_number(*v, "generator.risk.value_coef");
  }
  if (const auto *v = get_if(j, "type_coefs")) {
    gen.risk.type_coefs = as_number_array(*v, "generator.risk.type_coefs");
  }
  if (const auto *v = get_if(j, "intercept")) {
    gen.risk.intercept = as_number(*v, "generator.risk.intercept");
  }
}

void parse_generator(const nlohmann::json &j, GenConfig &gen) {
  reject_unknown_keys(j, "'generator'",
                      {"n_accounts", "n_transactions", "n_banks", "countries", "country_weights",
                       "value_mean_usd", "value_std_usd", "target_bad_fraction", "rng_seed",
                       "risk"});
  bool countries_given = false;
  if (const auto *v = get_if(j, "countries")) {
    if (!v->is_array()) {
      throw ConfigError("configuration error: generator.countries must be an array of strings");
    }
    gen.countries.clear();
    for (size_t i = 0; i < v->size(); ++i) {
      gen.countries.push_back(as_string((*v)[i], "generator.countries[" + std::to_string(i) + "]"));
    }
    countries_given = true;
  }
  if (countries_given) {
    // Companion defaults track the custom country count unless overridden.
    gen.country_weights.assign(gen.countries.size(), 1.0 / static_cast<double>(gen.countries.size()));
    gen.risk.country_risk = default_country_risks(gen.countries.size());
  }
  if (const auto *v = get_if(j, "n_accounts")) {
    gen.n_accounts = as_integer(*v, "generator.n_accounts");
  }
  if (const auto *v = get_if(j, "n_transactions")) {
    gen.n_transactions = as_integer(*v, "generator.n_transactions");
  }
  if (const auto *v = get_if(j, "n_banks")) {
    gen.n_banks = static_cast<int32_t>(as_integer(*v, "generator.n_banks"));
  }
  if (const auto *v = get_if(j, "country_weights")) {
    gen.country_weights = as_number_array(*v, "generator.country_weights");
  }
  if (const auto *v = get_if(j, "value_mean_usd")) {
    gen.value_mean_usd = as_number(*v, "generator.value_mean_usd");
  }
  if (const auto *v = get_if(j, "value_std_usd")) {
    gen.value_std_usd = as_number(*v, "generator.value_std_usd");
  }
  if (const auto *v = get_if(j, "target_bad_fraction")) {
    gen.target_bad_fraction = as_number(*v, "generator.target_bad_fraction");
  }
  if (const auto *v = get_if(j, "rng_seed")) {
    gen.rng_seed = static_cast<uint64_t>(as_integer(*v, "generator.rng_seed"));
  }
  if (const auto *v = get_if(j, "risk")) {
    if (!v->is_object()) {
      throw ConfigError("configuration error: generator.risk must be an object");
    }
    parse_risk(*v, gen);
  }
}

void parse_split(const nlohmann::json &j, SplitConfig &split) {
  reject_unknown_keys(j, "'split'", {"train", "val", "test"});
  if (const auto *v = get_if(j, "train")) {
    split.train = as_number(*v, "split.train");
  }
  if (const auto *v = get_if(j, "val")) {
    split.val = as_number(*v, "split.val");
  }
  if (const auto *v = get_if(j, "test")) {
    split.test = as_number(*v, "split.test");
  }
}

void parse_model(const nlohmann::json &j, ModelConfig &model) {
  reject_unknown_keys(j, "'model'",
                      {"hidden_dim", "aggregation", "epochs", "learning_rate", "class_weighting"});
  if (const auto *v = get_if(j, "hidden_dim")) {
    model.hidden_dim = static_cast<int32_t>(as_integer(*v, "model.hidden_dim"));
  }
  if (const auto *v = get_if(j, "aggregation")) {
    model.aggregation = aggregation_from_name(as_string(*v, "model.aggregation"));
  }
  if (const auto *v = get_if(j, "epochs")) {
    model.epochs = static_cast<int32_t>(as_integer(*v, "model.epochs"));
  }
  if (const auto *v = get_if(j, "learning_rate")) {
    model.learning_rate = as_number(*v, "model.learning_rate");
  }
  if (const auto *v = get_if(j, "class_weighting")) {
    model.class_weighting = class_weighting_from_name(as_string(*v, "model.class_weighting"));
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string &text, const std::string &origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError("configuration error: " + origin + ": " + e.what());
  }
  if (!j.is_object()) {
    throw ConfigError("configuration error: " + origin + ": top level must be a JSON object");
  }

  ExperimentConfig cfg;
  reject_unknown_keys(j, "'" + origin + "'",
                      {"generator", "indicators_path", "mode", "split", "model", "seeds",
                       "output_dir"});
  if (const auto *v = get_if(j, "generator")) {
    if (!v->is_object()) {
      throw ConfigError("configuration error: generator must be an object");
    }
    parse_generator(*v, cfg.generator);
  }
  if (const auto *v = get_if(j, "indicators_path")) {
    cfg.indicators_path = as_string(*v, "indicators_path");
  }
  if (const auto *v = get_if(j, "mode")) {
    cfg.mode = run_mode_from_name(as_string(*v, "mode"));
  }
  if (const auto *v = get_if(j, "split")) {
    if (!v->is_object()) {
      throw ConfigError("configuration error: split must be an object");
    }
    parse_split(*v, cfg.split);
  }
  if (const auto *v = get_if(j, "model")) {
    if (!v->is_object()) {
      throw ConfigError("configuration error: model must be an object");
    }
    parse_model(*v, cfg.model);
  }
  if (const auto *v = get_if(j, "seeds")) {
    if (!v->is_array() || v->empty()) {
      throw ConfigError("configuration error: seeds must be a non-empty array of integers");
    }
    cfg.seeds.clear();
    for (size_t i = 0; i < v->size(); ++i) {
      const int64_t s = as_integer((*v)[i], "seeds[" + std::to_string(i) + "]");
      if (s < 0) {
        throw ConfigError("configuration error: seeds[" + std::to_string(i) +
                          "] must be non-negative");
      }
      cfg.seeds.push_back(static_cast<uint64_t>(s));
    }
  }
  if (const auto *v = get_if(j, "output_dir")) {
    cfg.output_dir = as_string(*v, "output_dir");
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path &path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const DataError &e) {
    // A missing or unreadable config file is a configuration problem.
    throw ConfigError("configuration error: " + std::string(e.what()));
  }
  return parse_experiment_config(text, path.string());
}

nlohmann::json experiment_config_to_json(const ExperimentConfig &config) {
  nlohmann::json risk;
  risk["country_risk"] = config.generator.risk.country_risk;
  risk["value_coef"] = config.generator.risk.value_coef;
  risk["type_coefs"] = config.generator.risk.type_coefs;
  if (config.generator.risk.intercept) {
    risk["intercept"] = *config.generator.risk.intercept;
  } else {
    risk["intercept"] = nullptr;
  }

  nlohmann::json j;
  j["generator"] = {{"n_accounts", config.generator.n_accounts},
                    {"n_transactions", config.generator.n_transactions},
                    {"n_banks", config.generator.n_banks},
                    {"countries", config.generator.countries},
                    {"country_weights", config.generator.country_weights},
                    {"value_mean_usd", config.generator.value_mean_usd},
                    {"value_std_usd", config.generator.value_std_usd},
                    {"target_bad_fraction", config.generator.target_bad_fraction},
                    {"rng_seed", config.generator.rng_seed},
                    {"risk", risk}};
  j["indicators_path"] = config.indicators_path.string();
  j["mode"] = run_mode_name(config.mode);
  j["split"] = {{"train", config.split.train}, {"val", config.split.val}, {"test", config.split.test}};
  j["model"] = {{"hidden_dim", config.model.hidden_dim},
                {"aggregation", aggregation_name(config.model.aggregation)},
                {"epochs", config.model.epochs},
                {"learning_rate", config.model.learning_rate},
                {"class_weighting", class_weighting_name(config.model.class_weighting)}};
  j["seeds"] = config.seeds;
  j["output_dir"] = config.output_dir.string();
  return j;
}

}  // namespace aml
