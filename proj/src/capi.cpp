#include "amlhybrid/aml.h"

#include <exception>
#include <memory>
#include <optional>
#include <string>

#include "config.hpp"
#include "error.hpp"
#include "harness.hpp"
#include "version.hpp"

struct aml_experiment {
  aml::ExperimentConfig config;
  std::string table;
  std::optional<aml::ComparisonResult> comparison;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
aml_status guarded(Fn &&fn) {
  try {
    fn();
    g_last_error.clear();
    return AML_OK;
  } catch (const aml::Error &e) {
    g_last_error = e.what();
    return static_cast<aml_status>(e.kind());
  } catch (const std::exception &e) {
    g_last_error = std::string("internal error: ") + e.what();
    return AML_E_INTERNAL;
  } catch (...) {
    g_last_error = "internal error: unknown exception";
    return AML_E_INTERNAL;
  }
}

std::string string_or_empty(const char *s) { return s == nullptr ? std::string() : std::string(s); }

void fill_metrics(const aml::MetricsReport &m, aml_metrics *out) {
  if (out == nullptr) {
    return;
  }
  out->accuracy = m.rates.accuracy;
  out->precision = m.rates.precision;
  out->recall = m.rates.recall;
  out->f1 = m.rates.f1;
  out->auc = m.auc;
  out->tp = m.counts.tp;
  out->fp = m.counts.fp;
  out->tn = m.counts.tn;
  out->fn = m.counts.fn;
}

}  // namespace

extern "C" {

const char *aml_version(void) { return aml::kVersion; }

const char *aml_last_error(void) { return g_last_error.c_str(); }

aml_experiment *aml_experiment_open(const char *config_path) {
  aml_experiment *exp = nullptr;
  guarded([&] {
    if (config_path == nullptr) {
      throw aml::ConfigError("configuration error: config path is null");
    }
    auto handle = std::make_unique<aml_experiment>();
    handle->config = aml::load_experiment_config(config_path);
    exp = handle.release();
  });
  return exp;
}

aml_experiment *aml_experiment_from_json(const char *config_json) {
  aml_experiment *exp = nullptr;
  guarded([&] {
    if (config_json == nullptr) {
      throw aml::ConfigError("configuration error: config JSON is null");
    }
    auto handle = std::make_unique<aml_experiment>();
    handle->config = aml::parse_experiment_config(config_json, "config");
    exp = handle.release();
  });
  return exp;
}

void aml_experiment_close(aml_experiment *exp) { delete exp; }

aml_status aml_generate(aml_experiment *exp, const char *out_dir) {
  return guarded([&] {
    if (exp == nullptr) {
      throw aml::ConfigError("configuration error: experiment handle is null");
    }
    aml::cmd_generate(exp->config, string_or_empty(out_dir));
  });
}

aml_status aml_train(aml_experiment *exp, const char *mode, uint64_t seed, const char *out_dir,
                     aml_metrics *out) {
  return guarded([&] {
    if (exp == nullptr) {
      throw aml::ConfigError("configuration error: experiment handle is null");
    }
    const aml::FeatureMode feature_mode = aml::feature_mode_from_name(string_or_empty(mode));
    const aml::SingleRunResult result =
        aml::cmd_train(exp->config, feature_mode, seed, string_or_empty(out_dir));
    fill_metrics(result.test_metrics, out);
  });
}

aml_status aml_evaluate(const char *model_path, const char *data_dir, const char *report_path,
                        aml_metrics *out) {
  return guarded([&] {
    if (model_path == nullptr || data_dir == nullptr || report_path == nullptr) {
      throw aml::ConfigError("configuration error: evaluate paths must not be null");
    }
    const aml::MetricsReport m = aml::cmd_evaluate(model_path, data_dir, report_path);
    fill_metrics(m, out);
  });
}

aml_status aml_compare(aml_experiment *exp, const char *out_dir, double assert_delta) {
  return guarded([&] {
    if (exp == nullptr) {
      throw aml::ConfigError("configuration error: experiment handle is null");
    }
    exp->comparison = aml::cmd_compare(exp->config, string_or_empty(out_dir));
    exp->table = aml::emit_table(*exp->comparison);
    if (assert_delta >= 0.0) {
      aml::assert_delta_gate(*exp->comparison, assert_delta);
    }
  });
}

const char *aml_comparison_table(const aml_experiment *exp) {
  return exp == nullptr ? "" : exp->table.c_str();
}

aml_status aml_comparison_deltas(const aml_experiment *exp, double *d_accuracy, double *d_f1,
                                 double *d_auc) {
  return guarded([&] {
    if (exp == nullptr || !exp->comparison) {
      throw aml::ConfigError("configuration error: no comparison has been run on this handle");
    }
    if (d_accuracy != nullptr) {
      *d_accuracy = exp->comparison->delta_accuracy;
    }
    if (d_f1 != nullptr) {
      *d_f1 = exp->comparison->delta_f1;
    }
    if (d_auc != nullptr) {
      *d_auc = exp->comparison->delta_auc;
    }
  });
}

}  // extern "C"
