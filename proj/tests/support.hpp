#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "graphbuild.hpp"
#include "matrix.hpp"
#include "rgcn.hpp"

namespace amltest {

// Unique scratch directory under the system temp root, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string &stem) {
    static std::atomic<uint64_t> counter{0};
    auto base = std::filesystem::temp_directory_path();
    path_ = base / (stem + "_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::string str() const { return path_.string(); }
  std::string file(const std::string &name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// Builds a random graph whose forward relations are random edges and whose
// reverse relations are exact mirrors, as the real builder guarantees.
inline aml::RelGraph random_mirrored_graph(std::mt19937_64 &gen, int64_t n_nodes, int64_t dim,
                                           double edge_prob = 0.3) {
  aml::RelGraph g;
  g.n_accounts = 0;
  g.n_transactions = n_nodes;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> feat(-1.0, 1.0);

  for (int fwd = 0; fwd < 2; ++fwd) {
    std::vector<std::vector<int64_t>> rows(static_cast<size_t>(n_nodes));
    std::vector<std::vector<int64_t>> mirror(static_cast<size_t>(n_nodes));
    for (int64_t dst = 0; dst < n_nodes; ++dst) {
      for (int64_t src = 0; src < n_nodes; ++src) {
        if (src == dst) {
          continue;
        }
        if (unit(gen) < edge_prob) {
          rows[static_cast<size_t>(dst)].push_back(src);
          mirror[static_cast<size_t>(src)].push_back(dst);
        }
      }
    }
    auto to_csr = [&](const std::vector<std::vector<int64_t>> &adj) {
      aml::Csr csr;
      csr.row_ptr.assign(1, 0);
      for (const auto &r : adj) {
        for (int64_t c : r) {
          csr.col.push_back(c);
        }
        csr.row_ptr.push_back(static_cast<int64_t>(csr.col.size()));
      }
      return csr;
    };
    g.adj[static_cast<size_t>(fwd)] = to_csr(rows);
    g.adj[static_cast<size_t>(fwd) + 2] = to_csr(mirror);
  }

  g.features.resize_zeroed(n_nodes, dim);
  for (int64_t i = 0; i < n_nodes; ++i) {
    for (int64_t j = 0; j < dim; ++j) {
      g.features.at(i, j) = feat(gen);
    }
  }
  g.labels.assign(static_cast<size_t>(n_nodes), 0);
  return g;
}

// Dense reference for one relational layer: out = act(sum_r A_r X W_r + X W_self + b)
// with A_r either the raw adjacency (sum) or row-normalised by degree (mean).
inline aml::Matrix dense_layer_oracle(const aml::RelGraph &g, const aml::Matrix &x,
                                      const aml::LayerParams &p, aml::Aggregation agg,
                                      bool relu) {
  const int64_t n = g.n_nodes();
  const int64_t d_out = p.d_out();
  aml::Matrix out;
  out.resize_zeroed(n, d_out);

  for (size_t r = 0; r < aml::kRelationCount; ++r) {
    const aml::Csr &csr = g.adj[r];
    aml::Matrix dense_a;
    dense_a.resize_zeroed(n, n);
    for (int64_t i = 0; i < n; ++i) {
      const int64_t deg = csr.row_degree(i);
      const double scale =
          (agg == aml::Aggregation::mean && deg > 0) ? 1.0 / static_cast<double>(deg) : 1.0;
      for (int64_t e = csr.row_ptr[static_cast<size_t>(i)];
           e < csr.row_ptr[static_cast<size_t>(i) + 1]; ++e) {
        dense_a.at(i, csr.col[static_cast<size_t>(e)]) += scale;
      }
    }
    aml::Matrix ax;
    aml::matmul(dense_a, x, ax);
    aml::matmul_acc(ax, p.w_rel[r], out);
  }
  aml::matmul_acc(x, p.w_self, out);
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < d_out; ++j) {
      out.at(i, j) += p.bias.at(0, j);
      if (relu && out.at(i, j) < 0.0) {
        out.at(i, j) = 0.0;
      }
    }
  }
  return out;
}

// Dense reference for the whole two-layer model.
inline std::vector<double> dense_forward_oracle(const aml::RelGraph &g, const aml::Params &p,
                                                aml::Aggregation agg) {
  aml::Matrix h1 = dense_layer_oracle(g, g.features, p.conv1, agg, true);
  aml::Matrix h2 = dense_layer_oracle(g, h1, p.conv2, agg, false);
  std::vector<double> logits(static_cast<size_t>(h2.rows()));
  for (int64_t i = 0; i < h2.rows(); ++i) {
    logits[static_cast<size_t>(i)] = h2.at(i, 0);
  }
  return logits;
}

inline std::string repo_file(const std::string &rel) {
  return std::string(AML_REPO_DIR) + "/" + rel;
}

}  // namespace amltest
