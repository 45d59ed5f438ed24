#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace aml {

struct AccountRecord {
  int64_t account_id = 0;
  int32_t bank_id = 0;
  std::string country;

  bool operator==(const AccountRecord &) const = default;
};

struct TransactionRecord {
  int64_t tx_id = 0;
  int64_t src = 0;
  int64_t dst = 0;
  int32_t tx_type = 0;
  double value_usd = 0.0;  // rounded to cents so CSV round-trips are lossless
  int8_t label = 0;        // 1 = suspicious

  bool operator==(const TransactionRecord &) const = default;
};

// Coefficients of the label mechanism. The label of a transaction is
// Bernoulli(sigmoid(intercept + country_risk[src] + country_risk[dst] +
// value_coef * standardized_log_value + type_coefs[type])).
struct RiskModel {
  std::vector<double> country_risk;  // aligned with GenConfig::countries
  double value_coef = 0.25;
  std::vector<double> type_coefs = {-0.10, -0.05, 0.0, 0.05, 0.10};
  std::optional<double> intercept;   // empty -> calibrated to target_bad_fraction
};

struct GenConfig {
  int64_t n_accounts = 20000;
  int64_t n_transactions = 20000;
  int32_t n_banks = 50;
  std::vector<std::string> countries;       // defaults to default_countries()
  std::vector<double> country_weights;      // same length, sums to 1
  double value_mean_usd = 148339.46;
  double value_std_usd = 473121.20;
  double target_bad_fraction = 0.20;
  RiskModel risk;
  uint64_t rng_seed = 5;

  int32_t n_types() const { return static_cast<int32_t>(risk.type_coefs.size()); }
  void validate() const;  // throws ConfigError
};

// Sixteen ISO alpha-2 codes ordered from lowest to highest default risk; the
// shipped indicator fixture covers exactly this set.
const std::vector<std::string> &default_countries();

// Evenly spaced risk scores in [-1, +1] across n countries.
std::vector<double> default_country_risks(size_t n);

GenConfig default_gen_config();

// Log-space parameters (mu, sigma) of the log-normal value distribution
// matching the configured mean and standard deviation.
struct LogNormalParams {
  double mu = 0.0;
  double sigma = 1.0;
};
LogNormalParams value_distribution_params(double mean, double stddev);

std::vector<AccountRecord> generate_accounts(const GenConfig &cfg);

std::vector<TransactionRecord> generate_transactions(const std::vector<AccountRecord> &accounts,
                                                     const GenConfig &cfg);

// Everything in the label logit except the intercept, for n simulated
// transactions drawn from the probe stream. Used by intercept calibration
// and by tests verifying it.
std::vector<double> simulate_risk_terms(const GenConfig &cfg, int64_t n);

// Find the intercept b such that the mean of sigmoid(b + term) over n_probe
// simulated transactions is within 0.005 of target_bad_fraction. Bisection
// over [-20, 20]; throws ConfigError when the target cannot be bracketed.
double calibrate_intercept(const GenConfig &cfg, int64_t n_probe);

inline constexpr int64_t kDefaultCalibrationProbe = 100000;

struct Dataset {
  std::vector<AccountRecord> accounts;
  std::vector<TransactionRecord> transactions;
};

// accounts.csv + transactions.csv, LF line endings, values with exactly two
// decimal places.
void write_dataset(const std::vector<AccountRecord> &accounts,
                   const std::vector<TransactionRecord> &transactions,
                   const std::filesystem::path &dir);

Dataset read_dataset(const std::filesystem::path &dir);

}  // namespace aml
