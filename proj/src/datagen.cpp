#include "datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include "error.hpp"
#include "io.hpp"
#include "rng.hpp"

namespace aml {

const std::vector<std::string> &default_countries() {
  // Ordered from lowest to highest default risk; matches the ascending
  // money-laundering risk ranking of data/country_indicators.csv.
  static const std::vector<std::string> countries = {
      "FR", "GB", "DE", "SG", "CH", "US", "BR", "IN",
      "ZA", "AE", "MX", "CN", "PK", "RU", "TR", "NG",
  };
  return countries;
}

std::vector<double> default_country_risks(size_t n) {
  std::vector<double> risks(n, 0.0);
  if (n == 1) {
    return risks;
  }
  for (size_t i = 0; i < n; ++i) {
    risks[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return risks;
}

GenConfig default_gen_config() {
  GenConfig cfg;
  cfg.countries = default_countries();
  cfg.country_weights.assign(cfg.countries.size(), 1.0 / static_cast<double>(cfg.countries.size()));
  cfg.risk.country_risk = default_country_risks(cfg.countries.size());
  return cfg;
}

void GenConfig::validate() const {
  if (n_accounts < 2) {
    throw ConfigError("configuration error: n_accounts must be at least 2, got " +
                      std::to_string(n_accounts));
  }
  if (n_transactions < 0) {
    throw ConfigError("configuration error: n_transactions must be non-negative");
  }
  if (n_banks < 1) {
    throw ConfigError("configuration error: n_banks must be at least 1");
  }
  if (countries.empty()) {
    throw ConfigError("configuration error: country set is empty");
  }
  std::unordered_set<std::string> seen;
  for (const auto &c : countries) {
    if (c.empty()) {
      throw ConfigError("configuration error: empty country code");
    }
    if (!seen.insert(c).second) {
      throw ConfigError("configuration error: duplicate country code '" + c + "'");
    }
  }
  if (country_weights.size() != countries.size()) {
    throw ConfigError("configuration error: " + std::to_string(country_weights.size()) +
                      " country weights for " + std::to_string(countries.size()) + " countries");
  }
  double weight_sum = 0.0;
  for (double w : country_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ConfigError("configuration error: country weights must be non-negative");
    }
    weight_sum += w;
  }
  if (std::abs(weight_sum - 1.0) > 1e-9) {
    throw ConfigError("configuration error: country weights sum to " + std::to_string(weight_sum) +
                      ", expected 1");
  }
  if (!(value_mean_usd > 0.0) || !(value_std_usd > 0.0)) {
    throw ConfigError("configuration error: value_mean_usd and value_std_usd must be positive");
  }
  if (!(target_bad_fraction > 0.0) || !(target_bad_fraction < 1.0)) {
    throw ConfigError("configuration error: target_bad_fraction must be in (0, 1)");
  }
  if (risk.country_risk.size() != countries.size()) {
    throw ConfigError("configuration error: " + std::to_string(risk.country_risk.size()) +
                      " country risk scores for " + std::to_string(countries.size()) + " countries");
  }
  if (risk.type_coefs.empty()) {
    throw ConfigError("configuration error: type_coefs must name at least one transaction type");
  }
  for (double r : risk.country_risk) {
    if (!std::isfinite(r)) {
      throw ConfigError("configuration error: non-finite country risk score");
    }
  }
  for (double t : risk.type_coefs) {
    if (!std::isfinite(t)) {
      throw ConfigError("configuration error: non-finite type coefficient");
    }
  }
  if (!std::isfinite(risk.value_coef)) {
    throw ConfigError("configuration error: non-finite value coefficient");
  }
  if (risk.intercept && !std::isfinite(*risk.intercept)) {
    throw ConfigError("configuration error: non-finite intercept");
  }
}

LogNormalParams value_distribution_params(double mean, double stddev) {
  const double cv = stddev / mean;
  LogNormalParams p;
  const double sigma_sq = std::log(1.0 + cv * cv);
  p.sigma = std::sqrt(sigma_sq);
  p.mu = std::log(mean) - 0.5 * sigma_sq;
  return p;
}

static std::vector<double> cumulative_weights(const std::vector<double> &weights) {
  std::vector<double> cum(weights.size());
  double acc = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cum[i] = acc;
  }
  cum.back() = 1.0;
  return cum;
}

std::vector<AccountRecord> generate_accounts(const GenConfig &cfg) {
  cfg.validate();
  Rng rng(mix_seed(cfg.rng_seed, rng_tag::accounts));
  const auto cum = cumulative_weights(cfg.country_weights);
  std::vector<AccountRecord> accounts;
  accounts.reserve(static_cast<size_t>(cfg.n_accounts));
  for (int64_t id = 0; id < cfg.n_accounts; ++id) {
    AccountRecord a;
    a.account_id = id;
    a.bank_id = static_cast<int32_t>(rng.next_index(static_cast<uint64_t>(cfg.n_banks)));
    a.country = cfg.countries[rng.next_weighted(cum)];
    accounts.push_back(std::move(a));
  }
  return accounts;
}

static double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

static double round_cents(double v) {
  double r = std::round(v * 100.0) / 100.0;
  return r < 0.01 ? 0.01 : r;
}

std::vector<double> simulate_risk_terms(const GenConfig &cfg, int64_t n) {
  cfg.validate();
  Rng rng(mix_seed(cfg.rng_seed, rng_tag::calibration_probe));
  const auto cum = cumulative_weights(cfg.country_weights);
  const auto ln = value_distribution_params(cfg.value_mean_usd, cfg.value_std_usd);
  const int32_t n_types = cfg.n_types();

  std::vector<double> terms;
  terms.reserve(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    const size_t src_country = rng.next_weighted(cum);
    const size_t dst_country = rng.next_weighted(cum);
    const auto type = static_cast<size_t>(rng.next_index(static_cast<uint64_t>(n_types)));
    const double value = round_cents(std::exp(ln.mu + ln.sigma * rng.next_gauss()));
    const double z_log_value = (std::log(value) - ln.mu) / ln.sigma;
    terms.push_back(cfg.risk.country_risk[src_country] + cfg.risk.country_risk[dst_country] +
                    cfg.risk.value_coef * z_log_value + cfg.risk.type_coefs[type]);
  }
  return terms;
}

double calibrate_intercept(const GenConfig &cfg, int64_t n_probe) {
  if (n_probe < 1000) {
    throw ConfigError("calibration error: n_probe must be at least 1000, got " +
                      std::to_string(n_probe));
  }
  const auto terms = simulate_risk_terms(cfg, n_probe);
  const double target = cfg.target_bad_fraction;
  auto mean_prob = [&](double b) {
    double acc = 0.0;
    for (double t : terms) {
      acc += sigmoid(b + t);
    }
    return acc / static_cast<double>(terms.size());
  };

  double lo = -20.0, hi = 20.0;
  if (mean_prob(lo) > target || mean_prob(hi) < target) {
    throw ConfigError("calibration error: target bad fraction " + std::to_string(target) +
                      " cannot be bracketed on [-20, 20]");
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mean_prob(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double b = 0.5 * (lo + hi);
  if (std::abs(mean_prob(b) - target) > 0.005) {
    throw ConfigError("calibration error: probe mean misses target by more than 0.005");
  }
  return b;
}

std::vector<TransactionRecord> generate_transactions(const std::vector<AccountRecord> &accounts,
                                                     const GenConfig &cfg) {
  cfg.validate();
  if (accounts.size() < 2) {
    throw ConfigError("configuration error: need at least 2 accounts to draw src != dst pairs");
  }

  std::unordered_map<std::string, size_t> country_index;
  for (size_t i = 0; i < cfg.countries.size(); ++i) {
    country_index.emplace(cfg.countries[i], i);
  }
  std::vector<size_t> account_country(accounts.size());
  for (size_t i = 0; i < accounts.size(); ++i) {
    auto it = country_index.find(accounts[i].country);
    if (it == country_index.end()) {
      throw ConfigError("configuration error: account country '" + accounts[i].country +
                        "' not in the configured country set");
    }
    account_country[i] = it->second;
  }

  const double intercept =
      cfg.risk.intercept ? *cfg.risk.intercept : calibrate_intercept(cfg, kDefaultCalibrationProbe);
  const auto ln = value_distribution_params(cfg.value_mean_usd, cfg.value_std_usd);
  const uint64_t n_accounts = accounts.size();
  const int32_t n_types = cfg.n_types();

  Rng rng(mix_seed(cfg.rng_seed, rng_tag::transactions));
  std::vector<TransactionRecord> txs;
  txs.reserve(static_cast<size_t>(cfg.n_transactions));
  for (int64_t id = 0; id < cfg.n_transactions; ++id) {
    TransactionRecord t;
    t.tx_id = id;
    const uint64_t src = rng.next_index(n_accounts);
    uint64_t dst = rng.next_index(n_accounts - 1);
    if (dst >= src) {
      ++dst;  // uniform over accounts excluding src
    }
    t.src = accounts[src].account_id;
    t.dst = accounts[dst].account_id;
    t.tx_type = static_cast<int32_t>(rng.next_index(static_cast<uint64_t>(n_types)));
    t.value_usd = round_cents(std::exp(ln.mu + ln.sigma * rng.next_gauss()));

    const double z_log_value = (std::log(t.value_usd) - ln.mu) / ln.sigma;
    const double z = intercept + cfg.risk.country_risk[account_country[src]] +
                     cfg.risk.country_risk[account_country[dst]] +
                     cfg.risk.value_coef * z_log_value + cfg.risk.type_coefs[t.tx_type];
    t.label = rng.next_unit() < sigmoid(z) ? 1 : 0;
    txs.push_back(std::move(t));
  }
  return txs;
}

void write_dataset(const std::vector<AccountRecord> &accounts,
                   const std::vector<TransactionRecord> &transactions,
                   const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw DataError("I/O error: cannot create directory '" + dir.string() + "': " + ec.message());
  }

  std::string acc_csv = "account_id,bank_id,country\n";
  for (const auto &a : accounts) {
    acc_csv += std::to_string(a.account_id);
    acc_csv += ',';
    acc_csv += std::to_string(a.bank_id);
    acc_csv += ',';
    acc_csv += a.country;
    acc_csv += '\n';
  }
  io::atomic_write_file(dir / "accounts.csv", acc_csv);

  std::string tx_csv = "tx_id,src,dst,tx_type,value_usd,label\n";
  char value_buf[64];
  for (const auto &t : transactions) {
    std::snprintf(value_buf, sizeof(value_buf), "%.2f", t.value_usd);
    tx_csv += std::to_string(t.tx_id);
    tx_csv += ',';
    tx_csv += std::to_string(t.src);
    tx_csv += ',';
    tx_csv += std::to_string(t.dst);
    tx_csv += ',';
    tx_csv += std::to_string(t.tx_type);
    tx_csv += ',';
    tx_csv += value_buf;
    tx_csv += ',';
    tx_csv += std::to_string(int(t.label));
    tx_csv += '\n';
  }
  io::atomic_write_file(dir / "transactions.csv", tx_csv);
}

Dataset read_dataset(const std::filesystem::path &dir) {
  Dataset ds;

  {
    const auto path = dir / "accounts.csv";
    const auto lines = io::csv_lines(io::read_file(path));
    if (lines.empty() || lines[0] != "account_id,bank_id,country") {
      throw DataError("schema error: '" + path.string() +
                      "' must start with header 'account_id,bank_id,country'");
    }
    for (size_t i = 1; i < lines.size(); ++i) {
      const auto fields = io::split_csv_line(lines[i]);
      const std::string ctx = path.filename().string() + " row " + std::to_string(i);
      if (fields.size() != 3) {
        throw DataError("parse error: " + ctx + ": expected 3 fields, got " +
                        std::to_string(fields.size()));
      }
      AccountRecord a;
      a.account_id = io::parse_int(fields[0], ctx);
      a.bank_id = static_cast<int32_t>(io::parse_int(fields[1], ctx));
      a.country = fields[2];
      if (a.country.empty()) {
        throw DataError("parse error: " + ctx + ": empty country code");
      }
      ds.accounts.push_back(std::move(a));
    }
  }

  {
    const auto path = dir / "transactions.csv";
    const auto lines = io::csv_lines(io::read_file(path));
    if (lines.empty() || lines[0] != "tx_id,src,dst,tx_type,value_usd,label") {
      throw DataError("schema error: '" + path.string() +
                      "' must start with header 'tx_id,src,dst,tx_type,value_usd,label'");
    }
    for (size_t i = 1; i < lines.size(); ++i) {
      const auto fields = io::split_csv_line(lines[i]);
      const std::string ctx = path.filename().string() + " row " + std::to_string(i);
      if (fields.size() != 6) {
        throw DataError("parse error: " + ctx + ": expected 6 fields, got " +
                        std::to_string(fields.size()));
      }
      TransactionRecord t;
      t.tx_id = io::parse_int(fields[0], ctx);
      t.src = io::parse_int(fields[1], ctx);
      t.dst = io::parse_int(fields[2], ctx);
      t.tx_type = static_cast<int32_t>(io::parse_int(fields[3], ctx));
      t.value_usd = io::parse_double(fields[4], ctx);
      const int64_t label = io::parse_int(fields[5], ctx);
      if (label != 0 && label != 1) {
        throw DataError("parse error: " + ctx + ": label must be 0 or 1");
      }
      t.label = static_cast<int8_t>(label);
      if (!(t.value_usd > 0.0)) {
        throw DataError("parse error: " + ctx + ": value_usd must be positive");
      }
      if (t.src == t.dst) {
        throw DataError("parse error: " + ctx + ": src and dst accounts are equal");
      }
      if (t.tx_type < 0) {
        throw DataError("parse error: " + ctx + ": tx_type must be non-negative");
      }
      ds.transactions.push_back(std::move(t));
    }
  }

  return ds;
}

}  // namespace aml
