#include "graphbuild.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "error.hpp"
#include "io.hpp"
#include "rng.hpp"

namespace aml {

const char *relation_name(Relation r) {
  switch (r) {
    case Relation::debit: return "debit";
    case Relation::credit: return "credit";
    case Relation::debit_rev: return "debit_rev";
    case Relation::credit_rev: return "credit_rev";
  }
  throw InternalError("internal-consistency error: invalid relation value");
}

Relation relation_from_name(const std::string &name) {
  for (size_t r = 0; r < kRelationCount; ++r) {
    if (name == relation_name(static_cast<Relation>(r))) {
      return static_cast<Relation>(r);
    }
  }
  throw ConfigError("lookup error: unknown relation '" + name + "'");
}

Relation mirror_relation(Relation r) {
  switch (r) {
    case Relation::debit: return Relation::debit_rev;
    case Relation::credit: return Relation::credit_rev;
    case Relation::debit_rev: return Relation::debit;
    case Relation::credit_rev: return Relation::credit;
  }
  throw InternalError("internal-consistency error: invalid relation value");
}

const char *feature_mode_name(FeatureMode m) {
  return m == FeatureMode::synthetic ? "synthetic" : "hybrid";
}

FeatureMode feature_mode_from_name(const std::string &name) {
  if (name == "synthetic") {
    return FeatureMode::synthetic;
  }
  if (name == "hybrid") {
    return FeatureMode::hybrid;
  }
  throw ConfigError("configuration error: unknown feature mode '" + name +
                    "', expected 'synthetic' or 'hybrid'");
}

void SplitConfig::validate() const {
  if (!(train > 0.0) || !(val > 0.0) || !(test > 0.0)) {
    throw ConfigError("configuration error: split fractions must all be positive");
  }
  const double sum = train + val + test;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("configuration error: split fractions sum to " + std::to_string(sum) +
                      ", expected 1");
  }
}

SplitMasks stratified_split(const std::vector<int8_t> &labels, const SplitConfig &fractions,
                            uint64_t rng_seed) {
  fractions.validate();
  const size_t n = labels.size();
  SplitMasks masks;
  masks.train.assign(n, 0);
  masks.val.assign(n, 0);
  masks.test.assign(n, 0);

  std::array<std::vector<size_t>, 2> by_class;
  for (size_t i = 0; i < n; ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw DataError("input error: stratified split labels must be 0 or 1, got " +
                      std::to_string(int(labels[i])) + " at index " + std::to_string(i));
    }
    by_class[static_cast<size_t>(labels[i])].push_back(i);
  }

  Rng rng(mix_seed(rng_seed, rng_tag::split));
  const std::array<double, 3> frac = {fractions.train, fractions.val, fractions.test};
  std::array<std::vector<uint8_t> *, 3> mask_of = {&masks.train, &masks.val, &masks.test};

  for (size_t c = 0; c < 2; ++c) {
    auto &idx = by_class[c];
    if (idx.empty()) {
      continue;  // absent class; single-class data is rejected downstream
    }
    if (idx.size() < 2) {
      throw DataError("stratification error: class " + std::to_string(c) +
                      " has fewer than 2 members");
    }
    for (size_t i = idx.size() - 1; i > 0; --i) {
      const size_t j = static_cast<size_t>(rng.next_index(i + 1));
      std::swap(idx[i], idx[j]);
    }

    // Largest-remainder allocation; remainder ties resolve train, val, test.
    const double n_c = static_cast<double>(idx.size());
    std::array<size_t, 3> count;
    std::array<std::pair<double, size_t>, 3> rem;
    size_t assigned = 0;
    for (size_t s = 0; s < 3; ++s) {
      const double exact = frac[s] * n_c;
      count[s] = static_cast<size_t>(std::floor(exact));
      rem[s] = {exact - std::floor(exact), s};
      assigned += count[s];
    }
    std::stable_sort(rem.begin(), rem.end(),
                     [](const auto &a, const auto &b) { return a.first > b.first; });
    for (size_t k = 0; assigned < idx.size(); ++k, ++assigned) {
      ++count[rem[k % 3].second];
    }

    size_t pos = 0;
    for (size_t s = 0; s < 3; ++s) {
      for (size_t k = 0; k < count[s]; ++k, ++pos) {
        (*mask_of[s])[idx[pos]] = 1;
      }
    }
  }
  return masks;
}

namespace {

struct NodeIndex {
  std::vector<AccountRecord> accounts;         // sorted by account_id
  std::vector<TransactionRecord> transactions; // sorted by tx_id
  std::unordered_map<int64_t, int64_t> account_node;
};

NodeIndex canonical_order(const std::vector<AccountRecord> &accounts,
                          const std::vector<TransactionRecord> &transactions) {
  NodeIndex ni;
  ni.accounts = accounts;
  ni.transactions = transactions;
  std::sort(ni.accounts.begin(), ni.accounts.end(),
            [](const auto &a, const auto &b) { return a.account_id < b.account_id; });
  std::sort(ni.transactions.begin(), ni.transactions.end(),
            [](const auto &a, const auto &b) { return a.tx_id < b.tx_id; });
  for (size_t i = 0; i < ni.accounts.size(); ++i) {
    if (!ni.account_node.emplace(ni.accounts[i].account_id, static_cast<int64_t>(i)).second) {
      throw DataError("validation error: duplicate account_id " +
                      std::to_string(ni.accounts[i].account_id));
    }
  }
  for (size_t i = 1; i < ni.transactions.size(); ++i) {
    if (ni.transactions[i].tx_id == ni.transactions[i - 1].tx_id) {
      throw DataError("validation error: duplicate tx_id " +
                      std::to_string(ni.transactions[i].tx_id));
    }
  }
  return ni;
}

// Builds one CSR from (source, destination) pairs with rows keyed by
// destination; column lists come out sorted and are checked duplicate-free.
Csr build_csr(int64_t n_nodes, const std::vector<std::pair<int64_t, int64_t>> &edges) {
  Csr csr;
  csr.row_ptr.assign(static_cast<size_t>(n_nodes) + 1, 0);
  for (const auto &[src, dst] : edges) {
    ++csr.row_ptr[static_cast<size_t>(dst) + 1];
  }
  for (size_t i = 1; i < csr.row_ptr.size(); ++i) {
    csr.row_ptr[i] += csr.row_ptr[i - 1];
  }
  csr.col.resize(edges.size());
  std::vector<int64_t> cursor(csr.row_ptr.begin(), csr.row_ptr.end() - 1);
  for (const auto &[src, dst] : edges) {
    csr.col[static_cast<size_t>(cursor[static_cast<size_t>(dst)]++)] = src;
  }
  for (int64_t row = 0; row < n_nodes; ++row) {
    const auto begin = csr.col.begin() + csr.row_ptr[static_cast<size_t>(row)];
    const auto end = csr.col.begin() + csr.row_ptr[static_cast<size_t>(row) + 1];
    std::sort(begin, end);
    if (std::adjacent_find(begin, end) != end) {
      throw InternalError("internal-consistency error: duplicate edge in CSR row " +
                          std::to_string(row));
    }
  }
  return csr;
}

RelGraph assemble_graph(const NodeIndex &ni, const FeatureLayout &layout, bool frozen_layout) {
  RelGraph g;
  g.layout = layout;
  g.n_accounts = static_cast<int64_t>(ni.accounts.size());
  g.n_transactions = static_cast<int64_t>(ni.transactions.size());
  const int64_t n_nodes = g.n_nodes();

  std::unordered_map<std::string, size_t> country_col;
  for (size_t i = 0; i < layout.countries.size(); ++i) {
    country_col.emplace(layout.countries[i], i);
  }

  g.features = Matrix(static_cast<size_t>(n_nodes), layout.width());
  g.labels.assign(static_cast<size_t>(n_nodes), -1);
  g.account_ids.resize(ni.accounts.size());
  g.tx_ids.resize(ni.transactions.size());

  for (size_t i = 0; i < ni.accounts.size(); ++i) {
    const auto &a = ni.accounts[i];
    g.account_ids[i] = a.account_id;
    auto it = country_col.find(a.country);
    if (it == country_col.end()) {
      throw DataError("input error: account country '" + a.country +
                      "' is not in the feature layout");
    }
    auto row = g.features.row(i);
    row[layout.country_offset() + it->second] = 1.0;
    if (layout.mode == FeatureMode::hybrid) {
      const auto &ind = layout.indicators[it->second];
      for (size_t c = 0; c < kIndicatorCount; ++c) {
        row[layout.indicator_offset() + c] = ind[c];
      }
    }
  }

  std::array<std::vector<std::pair<int64_t, int64_t>>, kRelationCount> edges;
  for (auto &e : edges) {
    e.reserve(ni.transactions.size());
  }

  for (size_t i = 0; i < ni.transactions.size(); ++i) {
    const auto &t = ni.transactions[i];
    const int64_t tx_node = g.n_accounts + static_cast<int64_t>(i);
    g.tx_ids[i] = t.tx_id;

    auto src_it = ni.account_node.find(t.src);
    auto dst_it = ni.account_node.find(t.dst);
    if (src_it == ni.account_node.end() || dst_it == ni.account_node.end()) {
      throw DataError("referential-integrity error: transaction " + std::to_string(t.tx_id) +
                      " references unknown account " +
                      std::to_string(src_it == ni.account_node.end() ? t.src : t.dst));
    }
    if (t.tx_type >= layout.n_types) {
      throw DataError(frozen_layout
                          ? "input error: transaction " + std::to_string(t.tx_id) + " has tx_type " +
                                std::to_string(t.tx_type) + " outside the model feature layout"
                          : "internal-consistency error: tx_type exceeds derived vocabulary");
    }

    auto row = g.features.row(static_cast<size_t>(tx_node));
    row[layout.value_offset()] = (std::log(t.value_usd) - layout.log_value_mean) / layout.log_value_std;
    row[layout.type_offset() + static_cast<size_t>(t.tx_type)] = 1.0;
    g.labels[static_cast<size_t>(tx_node)] = t.label;

    edges[size_t(Relation::debit)].emplace_back(src_it->second, tx_node);
    edges[size_t(Relation::credit)].emplace_back(dst_it->second, tx_node);
    edges[size_t(Relation::debit_rev)].emplace_back(tx_node, src_it->second);
    edges[size_t(Relation::credit_rev)].emplace_back(tx_node, dst_it->second);
  }

  for (size_t r = 0; r < kRelationCount; ++r) {
    g.adj[r] = build_csr(n_nodes, edges[r]);
  }

  if (!g.features.all_finite()) {
    throw DataError("validation error: non-finite entries in the node feature matrix");
  }
  return g;
}

}  // namespace

RelGraph build_graph(const std::vector<AccountRecord> &accounts,
                     const std::vector<TransactionRecord> &transactions, FeatureMode mode,
                     const NormalizedIndicators *indicators, const SplitConfig &split,
                     uint64_t rng_seed) {
  if (mode == FeatureMode::hybrid && indicators == nullptr) {
    throw ConfigError("configuration error: hybrid mode requires a country indicator table");
  }
  if (transactions.empty()) {
    throw DataError("validation error: no transactions to build a graph from");
  }
  const NodeIndex ni = canonical_order(accounts, transactions);

  FeatureLayout layout;
  layout.mode = mode;
  {
    std::set<std::string> countries;
    for (const auto &a : ni.accounts) {
      countries.insert(a.country);
    }
    layout.countries.assign(countries.begin(), countries.end());
  }
  int32_t max_type = 0;
  for (const auto &t : ni.transactions) {
    max_type = std::max(max_type, t.tx_type);
  }
  layout.n_types = max_type + 1;

  double mean = 0.0;
  for (const auto &t : ni.transactions) {
    mean += std::log(t.value_usd);
  }
  mean /= static_cast<double>(ni.transactions.size());
  double var = 0.0;
  for (const auto &t : ni.transactions) {
    const double d = std::log(t.value_usd) - mean;
    var += d * d;
  }
  var /= static_cast<double>(ni.transactions.size());
  layout.log_value_mean = mean;
  // Degenerate all-equal values standardize to zero rather than erroring.
  layout.log_value_std = var > 0.0 ? std::sqrt(var) : 1.0;

  if (mode == FeatureMode::hybrid) {
    layout.indicators.resize(layout.countries.size());
    std::string missing;
    for (size_t i = 0; i < layout.countries.size(); ++i) {
      const int64_t row = indicators->find(layout.countries[i]);
      if (row < 0) {
        missing += missing.empty() ? layout.countries[i] : ", " + layout.countries[i];
      } else {
        layout.indicators[i] = indicators->values[static_cast<size_t>(row)];
      }
    }
    if (!missing.empty()) {
      throw DataError("coverage error: countries missing from indicator table: " + missing);
    }
  }

  RelGraph g = assemble_graph(ni, layout, /*frozen_layout=*/false);

  std::vector<int8_t> tx_labels(ni.transactions.size());
  for (size_t i = 0; i < ni.transactions.size(); ++i) {
    tx_labels[i] = ni.transactions[i].label;
  }
  const SplitMasks tx_masks = stratified_split(tx_labels, split, rng_seed);
  g.train_mask.assign(static_cast<size_t>(g.n_nodes()), 0);
  g.val_mask.assign(static_cast<size_t>(g.n_nodes()), 0);
  g.test_mask.assign(static_cast<size_t>(g.n_nodes()), 0);
  for (size_t i = 0; i < tx_labels.size(); ++i) {
    const size_t node = static_cast<size_t>(g.n_accounts) + i;
    g.train_mask[node] = tx_masks.train[i];
    g.val_mask[node] = tx_masks.val[i];
    g.test_mask[node] = tx_masks.test[i];
  }
  return g;
}

RelGraph build_graph_with_layout(const std::vector<AccountRecord> &accounts,
                                 const std::vector<TransactionRecord> &transactions,
                                 const FeatureLayout &layout) {
  if (transactions.empty()) {
    throw DataError("validation error: no transactions to build a graph from");
  }
  if (layout.mode == FeatureMode::hybrid && layout.indicators.size() != layout.countries.size()) {
    throw DataError("input error: feature layout is missing per-country indicators");
  }
  const NodeIndex ni = canonical_order(accounts, transactions);
  RelGraph g = assemble_graph(ni, layout, /*frozen_layout=*/true);
  g.train_mask.assign(static_cast<size_t>(g.n_nodes()), 0);
  g.val_mask.assign(static_cast<size_t>(g.n_nodes()), 0);
  g.test_mask.assign(static_cast<size_t>(g.n_nodes()), 0);
  return g;
}

std::vector<int64_t> degree_table(const RelGraph &graph, Relation r) {
  const Csr &csr = graph.relation(r);
  std::vector<int64_t> degrees(static_cast<size_t>(csr.n_rows()));
  for (int64_t i = 0; i < csr.n_rows(); ++i) {
    degrees[static_cast<size_t>(i)] = csr.row_degree(i);
  }
  return degrees;
}

std::vector<int64_t> degree_table(const RelGraph &graph, const std::string &relation) {
  return degree_table(graph, relation_from_name(relation));
}

void write_graph_summary(const RelGraph &graph, const std::filesystem::path &path) {
  nlohmann::json j;
  j["n_accounts"] = graph.n_accounts;
  j["n_transactions"] = graph.n_transactions;
  j["n_nodes"] = graph.n_nodes();
  j["feature_width"] = graph.layout.width();
  j["feature_mode"] = feature_mode_name(graph.layout.mode);
  j["n_countries"] = graph.layout.countries.size();
  j["n_types"] = graph.layout.n_types;
  nlohmann::json rel;
  for (size_t r = 0; r < kRelationCount; ++r) {
    rel[relation_name(static_cast<Relation>(r))] = graph.adj[r].nnz();
  }
  j["relation_edges"] = rel;
  auto count = [](const std::vector<uint8_t> &mask) {
    return std::accumulate(mask.begin(), mask.end(), int64_t{0});
  };
  j["split_sizes"] = {{"train", count(graph.train_mask)},
                      {"val", count(graph.val_mask)},
                      {"test", count(graph.test_mask)}};
  io::atomic_write_file(path, j.dump(2) + "\n");
}

}  // namespace aml
