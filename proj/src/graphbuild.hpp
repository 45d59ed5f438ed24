#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "datagen.hpp"
#include "enrich.hpp"
#include "matrix.hpp"

namespace aml {

// Fixed relation order. Messages flow source -> destination, so `debit` and
// `credit` carry account information into transaction nodes and the reverse
// relations carry it back out.
enum class Relation : int32_t {
  debit = 0,       // debited (source) account -> transaction
  credit = 1,      // credited (destination) account -> transaction
  debit_rev = 2,   // transaction -> debited account
  credit_rev = 3,  // transaction -> credited account
};

inline constexpr size_t kRelationCount = 4;

const char *relation_name(Relation r);
Relation relation_from_name(const std::string &name);
Relation mirror_relation(Relation r);

// Compressed sparse rows keyed by destination node: row i lists the source
// nodes whose messages arrive at node i.
struct Csr {
  std::vector<int64_t> row_ptr;  // size n_rows + 1
  std::vector<int64_t> col;      // size nnz, sorted within each row

  int64_t n_rows() const { return static_cast<int64_t>(row_ptr.size()) - 1; }
  int64_t nnz() const { return static_cast<int64_t>(col.size()); }
  int64_t row_degree(int64_t row) const { return row_ptr[row + 1] - row_ptr[row]; }
};

enum class FeatureMode { synthetic, hybrid };

const char *feature_mode_name(FeatureMode m);
FeatureMode feature_mode_from_name(const std::string &name);

// Column layout of the node feature matrix. The synthetic prefix
// [country one-hot | z(log value) | type one-hot] is identical in both modes;
// hybrid appends the four normalized country indicators.
struct FeatureLayout {
  std::vector<std::string> countries;  // one-hot order
  int32_t n_types = 0;
  double log_value_mean = 0.0;
  double log_value_std = 1.0;
  FeatureMode mode = FeatureMode::synthetic;
  // Per-country normalized indicator rows, aligned with `countries`.
  // Populated only in hybrid mode.
  std::vector<std::array<double, kIndicatorCount>> indicators;

  size_t country_offset() const { return 0; }
  size_t value_offset() const { return countries.size(); }
  size_t type_offset() const { return countries.size() + 1; }
  size_t indicator_offset() const { return countries.size() + 1 + static_cast<size_t>(n_types); }
  size_t width() const {
    return indicator_offset() + (mode == FeatureMode::hybrid ? kIndicatorCount : 0);
  }
};

struct SplitConfig {
  double train = 0.7;
  double val = 0.15;
  double test = 0.15;
  void validate() const;
};

struct SplitMasks {
  std::vector<uint8_t> train;
  std::vector<uint8_t> val;
  std::vector<uint8_t> test;
};

// Relational graph over account nodes [0, n_accounts) followed by transaction
// nodes [n_accounts, n_accounts + n_transactions), both in ascending id order.
struct RelGraph {
  int64_t n_accounts = 0;
  int64_t n_transactions = 0;
  std::array<Csr, kRelationCount> adj;
  Matrix features;             // n_nodes x layout.width()
  std::vector<int8_t> labels;  // n_nodes; -1 at account nodes
  std::vector<uint8_t> train_mask, val_mask, test_mask;  // n_nodes
  FeatureLayout layout;
  std::vector<int64_t> account_ids;  // node index -> original account_id
  std::vector<int64_t> tx_ids;       // (node index - n_accounts) -> tx_id

  int64_t n_nodes() const { return n_accounts + n_transactions; }

  const Csr &relation(Relation r) const { return adj[static_cast<size_t>(r)]; }
};

RelGraph build_graph(const std::vector<AccountRecord> &accounts,
                     const std::vector<TransactionRecord> &transactions, FeatureMode mode,
                     const NormalizedIndicators *indicators, const SplitConfig &split,
                     uint64_t rng_seed);

// Rebuilds a graph against a frozen feature layout (used when scoring new data
// with a saved model). No masks are assigned; labels are kept if present.
RelGraph build_graph_with_layout(const std::vector<AccountRecord> &accounts,
                                 const std::vector<TransactionRecord> &transactions,
                                 const FeatureLayout &layout);

// Per-class proportional split with largest-remainder rounding. Deterministic
// per seed; each class needs at least 2 members.
SplitMasks stratified_split(const std::vector<int8_t> &labels, const SplitConfig &fractions,
                            uint64_t rng_seed);

std::vector<int64_t> degree_table(const RelGraph &graph, Relation r);
std::vector<int64_t> degree_table(const RelGraph &graph, const std::string &relation);

// Writes a small structural summary (node/edge counts, feature width, split
// sizes) as JSON for debugging.
void write_graph_summary(const RelGraph &graph, const std::filesystem::path &path);

}  // namespace aml
