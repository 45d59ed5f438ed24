#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "datagen.hpp"

namespace aml {

// One row of the country indicator table: Basel AML index (higher = riskier),
// Digital Evolution Index (higher = more digitally evolved), Corruption
// Perceptions Index (0..100, higher = cleaner), and GDP per capita in USD.
struct CountryIndicatorRow {
  std::string country;
  double basel_aml = 0.0;
  double dei = 0.0;
  double cpi = 0.0;
  double gdp_per_capita_usd = 0.0;
  int32_t year = 0;
};

inline constexpr size_t kIndicatorCount = 4;
extern const std::array<const char *, kIndicatorCount> kIndicatorNames;

enum class NormPolicy { zscore, minmax };
enum class JoinPolicy { strict, impute_mean };

// Column-normalized indicator table. Each column is transformed as
// normalized = (transformed - offset) / scale, where "transformed" is the raw
// value except for GDP per capita, which is natural-log transformed first when
// log_gdp is set. Offsets and scales are retained so raw values can be
// recovered.
struct NormalizedIndicators {
  std::vector<std::string> countries;
  std::vector<std::array<double, kIndicatorCount>> values;
  std::array<double, kIndicatorCount> offset{};
  std::array<double, kIndicatorCount> scale{};
  NormPolicy policy = NormPolicy::zscore;
  bool log_gdp = true;

  // Row index for a country code, or -1 when the table does not cover it.
  int64_t find(const std::string &country) const;

  // Inverts the normalization (including the GDP log transform) for one row.
  std::array<double, kIndicatorCount> denormalize_row(size_t row) const;

 private:
  mutable std::unordered_map<std::string, size_t> index_;
};

std::vector<CountryIndicatorRow> load_country_indicators(const std::filesystem::path &path);

NormalizedIndicators normalize_indicators(const std::vector<CountryIndicatorRow> &rows,
                                          NormPolicy policy = NormPolicy::zscore,
                                          bool log_gdp = true);

// Result of joining normalized indicators onto accounts by country code.
struct CountryJoin {
  // account_id -> normalized 4-vector
  std::unordered_map<int64_t, std::array<double, kIndicatorCount>> features;
  int64_t imputed_accounts = 0;
  std::vector<std::string> imputed_countries;
};

CountryJoin attach_country_features(const std::vector<AccountRecord> &accounts,
                                    const NormalizedIndicators &normalized, JoinPolicy policy);

}  // namespace aml
