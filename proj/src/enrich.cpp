#include "enrich.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "error.hpp"
#include "io.hpp"

namespace aml {

const std::array<const char *, kIndicatorCount> kIndicatorNames = {
    "basel_aml",
    "dei",
    "cpi",
    "gdp_per_capita_usd",
};

static constexpr const char *kHeader = "country,basel_aml,dei,cpi,gdp_per_capita_usd,year";

std::vector<CountryIndicatorRow> load_country_indicators(const std::filesystem::path &path) {
  const auto lines = io::csv_lines(io::read_file(path));
  if (lines.empty()) {
    throw DataError("schema error: '" + path.string() + "' is empty, expected header '" +
                    kHeader + "'");
  }
  if (lines[0] != kHeader) {
    const auto got = io::split_csv_line(lines[0]);
    const std::unordered_set<std::string> got_set(got.begin(), got.end());
    for (const auto &col : io::split_csv_line(kHeader)) {
      if (!got_set.count(col)) {
        throw DataError("schema error: '" + path.string() + "' is missing column '" + col + "'");
      }
    }
    throw DataError("schema error: '" + path.string() + "' header must be exactly '" + kHeader +
                    "'");
  }

  std::vector<CountryIndicatorRow> rows;
  std::unordered_set<std::string> seen;
  for (size_t i = 1; i < lines.size(); ++i) {
    const auto fields = io::split_csv_line(lines[i]);
    const std::string ctx = path.filename().string() + " row " + std::to_string(i);
    if (fields.size() != 6) {
      throw DataError("parse error: " + ctx + ": expected 6 fields, got " +
                      std::to_string(fields.size()));
    }
    CountryIndicatorRow r;
    r.country = fields[0];
    if (r.country.empty()) {
      throw DataError("parse error: " + ctx + ": empty country code");
    }
    r.basel_aml = io::parse_double(fields[1], ctx + " column basel_aml");
    r.dei = io::parse_double(fields[2], ctx + " column dei");
    r.cpi = io::parse_double(fields[3], ctx + " column cpi");
    r.gdp_per_capita_usd = io::parse_double(fields[4], ctx + " column gdp_per_capita_usd");
    r.year = static_cast<int32_t>(io::parse_int(fields[5], ctx + " column year"));
    if (r.cpi < 0.0 || r.cpi > 100.0) {
      throw DataError("validation error: " + ctx + ": cpi must be in [0, 100], got " +
                      std::to_string(r.cpi));
    }
    if (!(r.gdp_per_capita_usd > 0.0)) {
      throw DataError("validation error: " + ctx + ": gdp_per_capita_usd must be positive");
    }
    if (!seen.insert(r.country).second) {
      throw DataError("validation error: " + ctx + ": duplicate country '" + r.country + "'");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

int64_t NormalizedIndicators::find(const std::string &country) const {
  if (index_.empty() && !countries.empty()) {
    for (size_t i = 0; i < countries.size(); ++i) {
      index_.emplace(countries[i], i);
    }
  }
  auto it = index_.find(country);
  return it == index_.end() ? -1 : static_cast<int64_t>(it->second);
}

std::array<double, kIndicatorCount> NormalizedIndicators::denormalize_row(size_t row) const {
  if (row >= values.size()) {
    throw InternalError("internal-consistency error: indicator row " + std::to_string(row) +
                        " out of range");
  }
  std::array<double, kIndicatorCount> raw{};
  for (size_t c = 0; c < kIndicatorCount; ++c) {
    double transformed = values[row][c] * scale[c] + offset[c];
    if (c == 3 && log_gdp) {
      transformed = std::exp(transformed);
    }
    raw[c] = transformed;
  }
  return raw;
}

NormalizedIndicators normalize_indicators(const std::vector<CountryIndicatorRow> &rows,
                                          NormPolicy policy, bool log_gdp) {
  if (rows.size() < 2) {
    throw DataError("validation error: normalization needs at least 2 countries, got " +
                    std::to_string(rows.size()));
  }

  NormalizedIndicators out;
  out.policy = policy;
  out.log_gdp = log_gdp;
  out.countries.reserve(rows.size());
  out.values.resize(rows.size());
  for (const auto &r : rows) {
    out.countries.push_back(r.country);
  }

  const double n = static_cast<double>(rows.size());
  for (size_t c = 0; c < kIndicatorCount; ++c) {
    std::vector<double> col(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
      double v = 0.0;
      switch (c) {
        case 0: v = rows[i].basel_aml; break;
        case 1: v = rows[i].dei; break;
        case 2: v = rows[i].cpi; break;
        case 3: v = log_gdp ? std::log(rows[i].gdp_per_capita_usd) : rows[i].gdp_per_capita_usd; break;
      }
      col[i] = v;
    }

    if (policy == NormPolicy::zscore) {
      double mean = 0.0;
      for (double v : col) {
        mean += v;
      }
      mean /= n;
      double var = 0.0;
      for (double v : col) {
        var += (v - mean) * (v - mean);
      }
      var /= n;
      if (!(var > 0.0)) {
        throw DataError(std::string("degenerate-data error: indicator column '") +
                        kIndicatorNames[c] + "' has zero variance");
      }
      out.offset[c] = mean;
      out.scale[c] = std::sqrt(var);
    } else {
      const auto [lo_it, hi_it] = std::minmax_element(col.begin(), col.end());
      if (!(*hi_it > *lo_it)) {
        throw DataError(std::string("degenerate-data error: indicator column '") +
                        kIndicatorNames[c] + "' has zero range");
      }
      out.offset[c] = *lo_it;
      out.scale[c] = *hi_it - *lo_it;
    }

    for (size_t i = 0; i < rows.size(); ++i) {
      out.values[i][c] = (col[i] - out.offset[c]) / out.scale[c];
    }
  }
  return out;
}

CountryJoin attach_country_features(const std::vector<AccountRecord> &accounts,
                                    const NormalizedIndicators &normalized, JoinPolicy policy) {
  CountryJoin join;
  join.features.reserve(accounts.size());
  std::set<std::string> missing;
  for (const auto &a : accounts) {
    const int64_t row = normalized.find(a.country);
    if (row >= 0) {
      join.features.emplace(a.account_id, normalized.values[static_cast<size_t>(row)]);
    } else if (policy == JoinPolicy::impute_mean) {
      // Zero is the column mean after z-scoring.
      join.features.emplace(a.account_id, std::array<double, kIndicatorCount>{});
      ++join.imputed_accounts;
      missing.insert(a.country);
    } else {
      missing.insert(a.country);
    }
  }
  join.imputed_countries.assign(missing.begin(), missing.end());

  if (policy == JoinPolicy::strict && !missing.empty()) {
    std::string codes;
    for (const auto &c : missing) {
      if (!codes.empty()) {
        codes += ", ";
      }
      codes += c;
    }
    throw DataError("coverage error: countries missing from indicator table: " + codes);
  }
  return join;
}

}  // namespace aml
