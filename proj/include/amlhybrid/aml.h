#ifndef AMLHYBRID_AML_H
#define AMLHYBRID_AML_H

/*
 * C interface to the transaction-graph experiment pipeline: synthetic AML
 * dataset generation, country-indicator enrichment, relational GCN training,
 * and the synthetic-vs-hybrid comparison. All functions are thread-safe as
 * long as each aml_experiment handle is used from one thread at a time.
 */

#include <stdint.h>

#if defined(_WIN32)
#define AML_API __declspec(dllexport)
#else
#define AML_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status values double as CLI exit codes. */
typedef enum aml_status {
  AML_OK = 0,
  AML_E_CONFIG = 2,   /* bad configuration or calibration failure */
  AML_E_DATA = 3,     /* I/O, schema, parse, or validation failure */
  AML_E_TRAIN = 4,    /* numeric overflow or divergence during training */
  AML_E_ASSERT = 5,   /* --assert-delta gate failed */
  AML_E_INTERNAL = 70 /* invariant violation; please report */
} aml_status;

typedef struct aml_experiment aml_experiment;

/* Test metrics produced by training or evaluation. */
typedef struct aml_metrics {
  double accuracy;
  double precision;
  double recall;
  double f1;
  double auc;
  int64_t tp, fp, tn, fn;
} aml_metrics;

AML_API const char *aml_version(void);

/* Message for the calling thread's most recent failure; "" when none. The
 * returned pointer stays valid until the next failing call on this thread. */
AML_API const char *aml_last_error(void);

/* Loads a JSON experiment config. Returns NULL on error (see aml_last_error).
 * Handles must be released with aml_experiment_close. */
AML_API aml_experiment *aml_experiment_open(const char *config_path);
AML_API aml_experiment *aml_experiment_from_json(const char *config_json);
AML_API void aml_experiment_close(aml_experiment *exp);

/* Writes accounts.csv and transactions.csv. out_dir NULL or "" falls back to
 * the config's output_dir. */
AML_API aml_status aml_generate(aml_experiment *exp, const char *out_dir);

/* Trains one arm ("synthetic" or "hybrid") with the given seed and writes
 * report_<mode>_<seed>.json plus model_<mode>_<seed>.json. Fills *out when
 * non-NULL. */
AML_API aml_status aml_train(aml_experiment *exp, const char *mode, uint64_t seed,
                             const char *out_dir, aml_metrics *out);

/* Scores every transaction in data_dir with a saved model and writes a JSON
 * report to report_path. Independent of any experiment handle. */
AML_API aml_status aml_evaluate(const char *model_path, const char *data_dir,
                                const char *report_path, aml_metrics *out);

/* Runs both arms over all configured seeds and writes per-seed reports,
 * comparison.json, and comparison.txt. assert_delta < 0 disables the gate;
 * otherwise a mean AUC delta below assert_delta yields AML_E_ASSERT (reports
 * are still written). */
AML_API aml_status aml_compare(aml_experiment *exp, const char *out_dir, double assert_delta);

/* Rendered comparison table from the last aml_compare on this handle; ""
 * before any comparison. Valid until the next aml_compare or close. */
AML_API const char *aml_comparison_table(const aml_experiment *exp);

/* Mean metric deltas (hybrid - synthetic) from the last aml_compare. Any
 * output pointer may be NULL. Fails with AML_E_CONFIG before a comparison. */
AML_API aml_status aml_comparison_deltas(const aml_experiment *exp, double *d_accuracy,
                                         double *d_f1, double *d_auc);

#ifdef __cplusplus
}
#endif

#endif /* AMLHYBRID_AML_H */
