#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "graphbuild.hpp"
#include "matrix.hpp"

namespace aml {

enum class Aggregation { sum, mean };

const char *aggregation_name(Aggregation a);
Aggregation aggregation_from_name(const std::string &name);

enum class ClassWeighting { balanced, none };

const char *class_weighting_name(ClassWeighting w);
ClassWeighting class_weighting_from_name(const std::string &name);

// Two convolution layers: d_in -> hidden (ReLU) -> 1 logit per node.
struct ModelConfig {
  int32_t hidden_dim = 16;
  Aggregation aggregation = Aggregation::sum;
  int32_t epochs = 200;
  double learning_rate = 0.01;
  ClassWeighting class_weighting = ClassWeighting::balanced;

  void validate() const;
};

// Weights for one convolution layer: a matrix per relation, a self-transform,
// and a bias row.
struct LayerParams {
  std::array<Matrix, kRelationCount> w_rel;  // d_in x d_out each
  Matrix w_self;                             // d_in x d_out
  Matrix bias;                               // 1 x d_out

  int64_t d_in() const { return w_self.rows(); }
  int64_t d_out() const { return w_self.cols(); }
};

struct Params {
  LayerParams conv1;
  LayerParams conv2;

  // Visits the 12 parameter tensors in a fixed order (conv1 relations, self,
  // bias; then conv2). Gradients and optimizer state reuse this shape.
  template <typename Fn>
  void for_each_tensor(Fn &&fn) {
    for (auto *layer : {&conv1, &conv2}) {
      for (auto &w : layer->w_rel) {
        fn(w);
      }
      fn(layer->w_self);
      fn(layer->bias);
    }
  }
  template <typename Fn>
  void for_each_tensor(Fn &&fn) const {
    const_cast<Params *>(this)->for_each_tensor([&](Matrix &m) { fn(std::as_const(m)); });
  }
};

Params init_params(int64_t d_in, const ModelConfig &config, uint64_t rng_seed);
Params zeros_like(const Params &params);

struct LayerCache {
  std::array<Matrix, kRelationCount> msg;  // aggregated inputs, n x d_in
  Matrix pre;                              // n x d_out
  Matrix post;                             // n x d_out
};

struct ForwardCache {
  LayerCache l1;
  LayerCache l2;
};

// Full forward pass. Logits live in cache.l2.post (n_nodes x 1).
ForwardCache forward(const RelGraph &graph, const Params &params, const ModelConfig &config);

// Logit column as a vector over all nodes.
std::vector<double> node_logits(const ForwardCache &cache);

struct ClassWeights {
  double w0 = 1.0;
  double w1 = 1.0;
};

// Balanced weights n_total / (2 * n_class) counted over the masked nodes.
ClassWeights balanced_class_weights(const std::vector<int8_t> &labels,
                                    const std::vector<uint8_t> &mask);

// Mean over masked nodes of w_y * BCE-with-logits, via the softplus identity.
double masked_loss(const std::vector<double> &logits, const std::vector<int8_t> &labels,
                   const std::vector<uint8_t> &mask, const ClassWeights &weights);

Params backward(const RelGraph &graph, const ForwardCache &cache, const Params &params,
                const ModelConfig &config, const std::vector<uint8_t> &mask,
                const ClassWeights &weights);

// Central finite differences of masked_loss over every parameter entry.
Params numeric_gradients(const RelGraph &graph, Params params, const ModelConfig &config,
                         const std::vector<uint8_t> &mask, const ClassWeights &weights,
                         double step = 1e-5);

struct AdamState {
  Params m;
  Params v;
  int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamState adam_init(const Params &params);
void adam_step(Params &params, const Params &grads, AdamState &state, double lr);

struct EpochStats {
  int32_t epoch = 0;       // 1-based
  double train_loss = 0.0; // at the parameters entering the epoch
  double val_loss = 0.0;   // after the update
  std::optional<double> val_auc;  // absent when the val mask is single-class
};

struct TrainResult {
  Params params;  // snapshot from the best epoch
  std::vector<EpochStats> history;
  int32_t best_epoch = 0;  // 0 when epochs == 0
  std::optional<double> best_val_auc;
};

TrainResult train(const RelGraph &graph, const ModelConfig &config, uint64_t rng_seed);

// Sigmoid probabilities for the transaction nodes, in canonical tx order.
std::vector<double> predict(const RelGraph &graph, const Params &params,
                            const ModelConfig &config);

struct ModelCheckpoint {
  Params params;
  ModelConfig config;
  FeatureLayout layout;
  uint64_t seed = 0;
};

void save_model(const ModelCheckpoint &ckpt, const std::filesystem::path &path);
ModelCheckpoint load_model(const std::filesystem::path &path);

}  // namespace aml
