#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "datagen.hpp"
#include "error.hpp"
#include "io.hpp"
#include "support.hpp"

using namespace aml;
using amltest::TempDir;

TEST_CASE("log-normal parameters match the configured moments") {
  // Closed-form inversion: sigma^2 = ln(1 + (std/mean)^2), mu = ln(mean) - sigma^2/2.
  LogNormalParams p = value_distribution_params(148339.46, 473121.20);
  CHECK(p.sigma * p.sigma == doctest::Approx(2.4134632248).epsilon(1e-9));
  CHECK(p.mu == doctest::Approx(10.7005269626).epsilon(1e-9));

  // Round-trip: the implied distribution moments reproduce the inputs.
  const double mean = std::exp(p.mu + p.sigma * p.sigma / 2.0);
  const double var = (std::exp(p.sigma * p.sigma) - 1.0) * std::exp(2.0 * p.mu + p.sigma * p.sigma);
  CHECK(mean == doctest::Approx(148339.46).epsilon(1e-9));
  CHECK(std::sqrt(var) == doctest::Approx(473121.20).epsilon(1e-9));
}

TEST_CASE("default config is self-consistent") {
  GenConfig cfg = default_gen_config();
  cfg.validate();
  CHECK(cfg.countries.size() == 16);
  CHECK(cfg.country_weights.size() == 16);
  CHECK(cfg.risk.country_risk.size() == 16);
  const double wsum = std::accumulate(cfg.country_weights.begin(), cfg.country_weights.end(), 0.0);
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cfg.risk.country_risk.front() == doctest::Approx(-1.0));
  CHECK(cfg.risk.country_risk.back() == doctest::Approx(1.0));
  CHECK(std::is_sorted(cfg.risk.country_risk.begin(), cfg.risk.country_risk.end()));
  CHECK(cfg.n_types() == 5);

  const auto &names = default_countries();
  std::set<std::string> unique(names.begin(), names.end());
  CHECK(unique.size() == names.size());
}

TEST_CASE("config validation rejects malformed inputs") {
  GenConfig cfg = default_gen_config();
  cfg.n_accounts = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = default_gen_config();
  cfg.country_weights[0] += 0.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = default_gen_config();
  cfg.target_bad_fraction = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = default_gen_config();
  cfg.value_std_usd = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = default_gen_config();
  cfg.risk.country_risk.pop_back();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = default_gen_config();
  cfg.countries[3] = cfg.countries[2];
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("generated accounts respect the configured vocabularies") {
  GenConfig cfg = default_gen_config();
  cfg.n_accounts = 500;
  auto accounts = generate_accounts(cfg);
  REQUIRE(accounts.size() == 500);
  std::set<std::string> allowed(cfg.countries.begin(), cfg.countries.end());
  for (size_t i = 0; i < accounts.size(); ++i) {
    CHECK(accounts[i].account_id == int64_t(i));
    CHECK(accounts[i].bank_id >= 0);
    CHECK(accounts[i].bank_id < cfg.n_banks);
    CHECK(allowed.count(accounts[i].country) == 1);
  }

  // Same seed, same accounts; different seed, different draw somewhere.
  auto again = generate_accounts(cfg);
  CHECK(again == accounts);
  GenConfig other = cfg;
  other.rng_seed = cfg.rng_seed + 1;
  CHECK(generate_accounts(other) != accounts);
}

TEST_CASE("transactions never self-loop and stay in range") {
  GenConfig cfg = default_gen_config();
  cfg.n_accounts = 50;
  cfg.n_transactions = 2000;
  auto accounts = generate_accounts(cfg);
  auto txs = generate_transactions(accounts, cfg);
  REQUIRE(txs.size() == 2000);
  for (size_t i = 0; i < txs.size(); ++i) {
    const auto &t = txs[i];
    CHECK(t.tx_id == int64_t(i));
    CHECK(t.src != t.dst);
    CHECK(t.src >= 0);
    CHECK(t.src < cfg.n_accounts);
    CHECK(t.dst >= 0);
    CHECK(t.dst < cfg.n_accounts);
    CHECK(t.tx_type >= 0);
    CHECK(t.tx_type < cfg.n_types());
    CHECK(t.value_usd >= 0.01);
    // Cent-rounded: scaling by 100 gives an integer.
    const double cents = t.value_usd * 100.0;
    CHECK(std::abs(cents - std::round(cents)) < 1e-6);
    CHECK((t.label == 0 || t.label == 1));
  }
}

TEST_CASE("generation is deterministic per seed") {
  GenConfig cfg = default_gen_config();
  cfg.n_accounts = 40;
  cfg.n_transactions = 300;
  auto accounts = generate_accounts(cfg);
  auto a = generate_transactions(accounts, cfg);
  auto b = generate_transactions(accounts, cfg);
  CHECK(a == b);

  GenConfig other = cfg;
  other.rng_seed = cfg.rng_seed + 17;
  auto c = generate_transactions(generate_accounts(other), other);
  CHECK(a != c);
}

TEST_CASE("calibrated intercept hits the target bad fraction") {
  GenConfig cfg = default_gen_config();
  const double b = calibrate_intercept(cfg, 20000);
  auto terms = simulate_risk_terms(cfg, 20000);
  double mean = 0.0;
  for (double t : terms) {
    mean += 1.0 / (1.0 + std::exp(-(b + t)));
  }
  mean /= double(terms.size());
  CHECK(std::abs(mean - cfg.target_bad_fraction) <= 0.005);

  CHECK_THROWS_AS(calibrate_intercept(cfg, 10), ConfigError);
}

TEST_CASE("explicit intercept bypasses calibration") {
  GenConfig cfg = default_gen_config();
  cfg.n_accounts = 30;
  cfg.n_transactions = 4000;
  cfg.risk.intercept = -40.0;  // sigmoid ~ 0 regardless of risk terms
  auto txs = generate_transactions(generate_accounts(cfg), cfg);
  int64_t bad = 0;
  for (const auto &t : txs) {
    bad += t.label;
  }
  CHECK(bad == 0);

  cfg.risk.intercept = 40.0;
  txs = generate_transactions(generate_accounts(cfg), cfg);
  bad = 0;
  for (const auto &t : txs) {
    bad += t.label;
  }
  CHECK(bad == int64_t(txs.size()));
}

TEST_CASE("realized marginals approach the configured targets") {
  GenConfig cfg = default_gen_config();
  cfg.n_accounts = 2000;
  cfg.n_transactions = 30000;
  auto txs = generate_transactions(generate_accounts(cfg), cfg);

  double bad = 0.0, sum = 0.0;
  for (const auto &t : txs) {
    bad += t.label;
    sum += t.value_usd;
  }
  const double frac = bad / double(txs.size());
  const double mean = sum / double(txs.size());
  // Loose gates for a modest n; the acceptance suite pins the tight ones.
  CHECK(frac > 0.17);
  CHECK(frac < 0.23);
  CHECK(mean > 0.80 * cfg.value_mean_usd);
  CHECK(mean < 1.25 * cfg.value_mean_usd);
}

TEST_CASE("country risk shifts the bad rate in the configured direction") {
  GenConfig cfg = default_gen_config();
  cfg.n_accounts = 4000;
  cfg.n_transactions = 40000;
  auto accounts = generate_accounts(cfg);
  auto txs = generate_transactions(accounts, cfg);

  std::map<std::string, size_t> country_index;
  for (size_t i = 0; i < cfg.countries.size(); ++i) {
    country_index[cfg.countries[i]] = i;
  }
  // Split countries into the low-risk and high-risk halves by configured risk.
  double lo_bad = 0, lo_n = 0, hi_bad = 0, hi_n = 0;
  for (const auto &t : txs) {
    const size_t ci = country_index[accounts[size_t(t.src)].country];
    const double risk = cfg.risk.country_risk[ci];
    if (risk < 0) {
      lo_bad += t.label;
      lo_n += 1;
    } else if (risk > 0) {
      hi_bad += t.label;
      hi_n += 1;
    }
  }
  REQUIRE(lo_n > 0);
  REQUIRE(hi_n > 0);
  CHECK(hi_bad / hi_n > lo_bad / lo_n + 0.05);
}

TEST_CASE("dataset round-trips through CSV exactly") {
  GenConfig cfg = default_gen_config();
  cfg.n_accounts = 25;
  cfg.n_transactions = 200;
  auto accounts = generate_accounts(cfg);
  auto txs = generate_transactions(accounts, cfg);

  TempDir dir("datagen_roundtrip");
  write_dataset(accounts, txs, dir.path());

  Dataset back = read_dataset(dir.path());
  CHECK(back.accounts == accounts);
  CHECK(back.transactions == txs);

  // Exact headers, LF endings, two decimal places.
  std::string acc_csv = io::read_file(dir.file("accounts.csv"));
  std::string tx_csv = io::read_file(dir.file("transactions.csv"));
  CHECK(acc_csv.rfind("account_id,bank_id,country\n", 0) == 0);
  CHECK(tx_csv.rfind("tx_id,src,dst,tx_type,value_usd,label\n", 0) == 0);
  CHECK(acc_csv.find('\r') == std::string::npos);
  CHECK(tx_csv.find('\r') == std::string::npos);
}

TEST_CASE("reader rejects malformed datasets") {
  TempDir dir("datagen_bad");
  auto write = [&](const std::string &name, const std::string &body) {
    std::ofstream out(dir.file(name));
    out << body;
  };

  SUBCASE("wrong header") {
    write("accounts.csv", "id,bank,country\n0,0,FR\n");
    write("transactions.csv", "tx_id,src,dst,tx_type,value_usd,label\n");
    CHECK_THROWS_WITH_AS(read_dataset(dir.path()), doctest::Contains("schema"), DataError);
  }
  SUBCASE("field count off") {
    write("accounts.csv", "account_id,bank_id,country\n0,0\n");
    write("transactions.csv", "tx_id,src,dst,tx_type,value_usd,label\n");
    CHECK_THROWS_AS(read_dataset(dir.path()), DataError);
  }
  SUBCASE("label out of range") {
    write("accounts.csv", "account_id,bank_id,country\n0,0,FR\n1,0,GB\n");
    write("transactions.csv", "tx_id,src,dst,tx_type,value_usd,label\n0,0,1,0,10.00,2\n");
    CHECK_THROWS_AS(read_dataset(dir.path()), DataError);
  }
  SUBCASE("self-loop") {
    write("accounts.csv", "account_id,bank_id,country\n0,0,FR\n1,0,GB\n");
    write("transactions.csv", "tx_id,src,dst,tx_type,value_usd,label\n0,1,1,0,10.00,1\n");
    CHECK_THROWS_AS(read_dataset(dir.path()), DataError);
  }
  SUBCASE("nonpositive value") {
    write("accounts.csv", "account_id,bank_id,country\n0,0,FR\n1,0,GB\n");
    write("transactions.csv", "tx_id,src,dst,tx_type,value_usd,label\n0,0,1,0,0.00,1\n");
    CHECK_THROWS_AS(read_dataset(dir.path()), DataError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_dataset(dir.path()), DataError);
  }
}
