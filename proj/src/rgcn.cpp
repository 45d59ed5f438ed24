#include "rgcn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <json.hpp>

#include "error.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "rng.hpp"
#include "version.hpp"

namespace aml {

const char *aggregation_name(Aggregation a) { return a == Aggregation::sum ? "sum" : "mean"; }

Aggregation aggregation_from_name(const std::string &name) {
  if (name == "sum") {
    return Aggregation::sum;
  }
  if (name == "mean") {
    return Aggregation::mean;
  }
  throw ConfigError("configuration error: unknown aggregation '" + name +
                    "', expected 'sum' or 'mean'");
}

const char *class_weighting_name(ClassWeighting w) {
  return w == ClassWeighting::balanced ? "balanced" : "none";
}

ClassWeighting class_weighting_from_name(const std::string &name) {
  if (name == "balanced") {
    return ClassWeighting::balanced;
  }
  if (name == "none") {
    return ClassWeighting::none;
  }
  throw ConfigError("configuration error: unknown class weighting '" + name +
                    "', expected 'balanced' or 'none'");
}

void ModelConfig::validate() const {
  if (hidden_dim < 1) {
    throw ConfigError("configuration error: hidden_dim must be positive, got " +
                      std::to_string(hidden_dim));
  }
  if (epochs < 0) {
    throw ConfigError("configuration error: epochs must be non-negative");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("configuration error: learning_rate must be positive and finite");
  }
}

static Matrix glorot_matrix(int64_t d_in, int64_t d_out, Rng &rng) {
  Matrix m(d_in, d_out);
  const double bound = std::sqrt(6.0 / static_cast<double>(d_in + d_out));
  for (size_t i = 0; i < m.size(); ++i) {
    m.data()[i] = (2.0 * rng.next_unit() - 1.0) * bound;
  }
  return m;
}

Params init_params(int64_t d_in, const ModelConfig &config, uint64_t rng_seed) {
  config.validate();
  if (d_in < 1) {
    throw ConfigError("configuration error: input feature width must be positive, got " +
                      std::to_string(d_in));
  }
  Rng rng(rng_seed);
  Params p;
  const int64_t dims[3] = {d_in, config.hidden_dim, 1};
  LayerParams *layers[2] = {&p.conv1, &p.conv2};
  for (int l = 0; l < 2; ++l) {
    for (auto &w : layers[l]->w_rel) {
      w = glorot_matrix(dims[l], dims[l + 1], rng);
    }
    layers[l]->w_self = glorot_matrix(dims[l], dims[l + 1], rng);
    layers[l]->bias = Matrix(1, dims[l + 1]);
  }
  return p;
}

Params zeros_like(const Params &params) {
  Params z;
  LayerParams const *src[2] = {&params.conv1, &params.conv2};
  LayerParams *dst[2] = {&z.conv1, &z.conv2};
  for (int l = 0; l < 2; ++l) {
    for (size_t r = 0; r < kRelationCount; ++r) {
      dst[l]->w_rel[r] = Matrix(src[l]->w_rel[r].rows(), src[l]->w_rel[r].cols());
    }
    dst[l]->w_self = Matrix(src[l]->w_self.rows(), src[l]->w_self.cols());
    dst[l]->bias = Matrix(src[l]->bias.rows(), src[l]->bias.cols());
  }
  return z;
}

// out = agg_r(x): row i accumulates x over i's in-neighbors under r,
// divided by the in-degree for mean aggregation (0 when isolated).
static Matrix aggregate(const RelGraph &graph, Relation r, const Matrix &x, Aggregation agg) {
  const Csr &csr = graph.relation(r);
  Matrix out(x.rows(), x.cols());
  const int64_t d = x.cols();
  for (int64_t i = 0; i < csr.n_rows(); ++i) {
    double *orow = out.data() + i * d;
    for (int64_t e = csr.row_ptr[i]; e < csr.row_ptr[i + 1]; ++e) {
      const double *xrow = x.data() + csr.col[static_cast<size_t>(e)] * d;
      for (int64_t c = 0; c < d; ++c) {
        orow[c] += xrow[c];
      }
    }
    if (agg == Aggregation::mean) {
      const int64_t deg = csr.row_degree(i);
      if (deg > 1) {
        for (int64_t c = 0; c < d; ++c) {
          orow[c] /= static_cast<double>(deg);
        }
      }
    }
  }
  return out;
}

// out = agg_r(x)^T applied to x, i.e. the adjoint of `aggregate` used by the
// backward pass. For sum aggregation this is sum-aggregation along the mirror
// relation; for mean, rows of x are pre-scaled by 1/in-degree under r.
static Matrix transpose_aggregate(const RelGraph &graph, Relation r, const Matrix &x,
                                  Aggregation agg) {
  if (agg == Aggregation::sum) {
    return aggregate(graph, mirror_relation(r), x, Aggregation::sum);
  }
  const Csr &csr = graph.relation(r);
  Matrix scaled(x.rows(), x.cols());
  const int64_t d = x.cols();
  for (int64_t i = 0; i < x.rows(); ++i) {
    const int64_t deg = csr.row_degree(i);
    if (deg == 0) {
      continue;
    }
    const double inv = 1.0 / static_cast<double>(deg);
    const double *xrow = x.data() + i * d;
    double *srow = scaled.data() + i * d;
    for (int64_t c = 0; c < d; ++c) {
      srow[c] = xrow[c] * inv;
    }
  }
  return aggregate(graph, mirror_relation(r), scaled, Aggregation::sum);
}

static void add_bias_rows(Matrix &m, const Matrix &bias) {
  for (int64_t i = 0; i < m.rows(); ++i) {
    double *row = m.data() + i * m.cols();
    for (int64_t c = 0; c < m.cols(); ++c) {
      row[c] += bias.data()[c];
    }
  }
}

static void run_layer(const RelGraph &graph, const Matrix &input, const LayerParams &layer,
                      Aggregation agg, bool relu, int layer_index, LayerCache &out) {
  if (input.cols() != layer.d_in()) {
    throw InternalError("internal-consistency error: layer " + std::to_string(layer_index) +
                        " expects width " + std::to_string(layer.d_in()) + ", got " +
                        std::to_string(input.cols()));
  }
  out.pre.resize_zeroed(input.rows(), layer.d_out());
  for (size_t r = 0; r < kRelationCount; ++r) {
    out.msg[r] = aggregate(graph, static_cast<Relation>(r), input, agg);
    matmul_acc(out.msg[r], layer.w_rel[r], out.pre);
  }
  matmul_acc(input, layer.w_self, out.pre);
  add_bias_rows(out.pre, layer.bias);
  if (!out.pre.all_finite()) {
    throw TrainError("numeric-overflow error: non-finite values in layer " +
                     std::to_string(layer_index));
  }
  out.post = out.pre;
  if (relu) {
    for (size_t i = 0; i < out.post.size(); ++i) {
      out.post.data()[i] = std::max(0.0, out.post.data()[i]);
    }
  }
}

ForwardCache forward(const RelGraph &graph, const Params &params, const ModelConfig &config) {
  ForwardCache cache;
  run_layer(graph, graph.features, params.conv1, config.aggregation, /*relu=*/true, 1, cache.l1);
  run_layer(graph, cache.l1.post, params.conv2, config.aggregation, /*relu=*/false, 2, cache.l2);
  return cache;
}

std::vector<double> node_logits(const ForwardCache &cache) {
  const Matrix &out = cache.l2.post;
  std::vector<double> logits(static_cast<size_t>(out.rows()));
  for (int64_t i = 0; i < out.rows(); ++i) {
    logits[static_cast<size_t>(i)] = out.at(i, 0);
  }
  return logits;
}

ClassWeights balanced_class_weights(const std::vector<int8_t> &labels,
                                    const std::vector<uint8_t> &mask) {
  int64_t n0 = 0, n1 = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (!mask[i]) {
      continue;
    }
    (labels[i] == 1 ? n1 : n0) += 1;
  }
  if (n0 == 0 || n1 == 0) {
    throw DataError("evaluation error: class " + std::string(n0 == 0 ? "0" : "1") +
                    " is absent under the mask; balanced weights undefined");
  }
  const double total = static_cast<double>(n0 + n1);
  return {total / (2.0 * static_cast<double>(n0)), total / (2.0 * static_cast<double>(n1))};
}

static double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

static double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double masked_loss(const std::vector<double> &logits, const std::vector<int8_t> &labels,
                   const std::vector<uint8_t> &mask, const ClassWeights &weights) {
  if (logits.size() != labels.size() || logits.size() != mask.size()) {
    throw InternalError("internal-consistency error: loss input lengths disagree");
  }
  double acc = 0.0;
  int64_t count = 0;
  for (size_t i = 0; i < logits.size(); ++i) {
    if (!mask[i]) {
      continue;
    }
    if (labels[i] != 0 && labels[i] != 1) {
      throw InternalError("internal-consistency error: masked node " + std::to_string(i) +
                          " has no binary label");
    }
    const double z = logits[i];
    // BCE with logits: softplus(-z) for label 1, softplus(z) for label 0.
    acc += labels[i] == 1 ? weights.w1 * softplus(-z) : weights.w0 * softplus(z);
    ++count;
  }
  if (count == 0) {
    throw DataError("evaluation error: empty mask");
  }
  return acc / static_cast<double>(count);
}

Params backward(const RelGraph &graph, const ForwardCache &cache, const Params &params,
                const ModelConfig &config, const std::vector<uint8_t> &mask,
                const ClassWeights &weights) {
  const int64_t n = graph.n_nodes();
  if (cache.l2.post.rows() != n || cache.l1.post.cols() != params.conv1.d_out() ||
      cache.l2.post.cols() != params.conv2.d_out() ||
      static_cast<int64_t>(mask.size()) != n) {
    throw InternalError("internal-consistency error: backward inputs do not match the cache");
  }

  int64_t count = 0;
  for (size_t i = 0; i < mask.size(); ++i) {
    count += mask[i] ? 1 : 0;
  }
  if (count == 0) {
    throw DataError("evaluation error: empty mask");
  }

  // dL/dZ2 for the weighted BCE mean: w_y * (sigmoid(z) - y) / count.
  Matrix g2(n, 1);
  for (int64_t i = 0; i < n; ++i) {
    if (!mask[static_cast<size_t>(i)]) {
      continue;
    }
    const int8_t y = graph.labels[static_cast<size_t>(i)];
    const double w = y == 1 ? weights.w1 : weights.w0;
    g2.at(i, 0) = w * (sigmoid(cache.l2.post.at(i, 0)) - static_cast<double>(y)) /
                  static_cast<double>(count);
  }

  Params grads = zeros_like(params);

  for (size_t r = 0; r < kRelationCount; ++r) {
    matmul_tn_acc(cache.l2.msg[r], g2, grads.conv2.w_rel[r]);
  }
  matmul_tn_acc(cache.l1.post, g2, grads.conv2.w_self);
  for (int64_t i = 0; i < n; ++i) {
    grads.conv2.bias.at(0, 0) += g2.at(i, 0);
  }

  // dH1 = sum_r agg_r^T(g2) W_r^T + g2 W_self^T
  Matrix dh1(n, params.conv1.d_out());
  for (size_t r = 0; r < kRelationCount; ++r) {
    const Matrix back = transpose_aggregate(graph, static_cast<Relation>(r), g2,
                                            config.aggregation);
    matmul_nt_acc(back, params.conv2.w_rel[r], dh1);
  }
  matmul_nt_acc(g2, params.conv2.w_self, dh1);

  // ReLU gate
  for (int64_t i = 0; i < dh1.rows(); ++i) {
    for (int64_t c = 0; c < dh1.cols(); ++c) {
      if (cache.l1.pre.at(i, c) <= 0.0) {
        dh1.at(i, c) = 0.0;
      }
    }
  }

  for (size_t r = 0; r < kRelationCount; ++r) {
    matmul_tn_acc(cache.l1.msg[r], dh1, grads.conv1.w_rel[r]);
  }
  matmul_tn_acc(graph.features, dh1, grads.conv1.w_self);
  for (int64_t i = 0; i < dh1.rows(); ++i) {
    for (int64_t c = 0; c < dh1.cols(); ++c) {
      grads.conv1.bias.at(0, c) += dh1.at(i, c);
    }
  }
  return grads;
}

Params numeric_gradients(const RelGraph &graph, Params params, const ModelConfig &config,
                         const std::vector<uint8_t> &mask, const ClassWeights &weights,
                         double step) {
  Params grads = zeros_like(params);
  std::vector<Matrix *> p_tensors, g_tensors;
  params.for_each_tensor([&](Matrix &m) { p_tensors.push_back(&m); });
  grads.for_each_tensor([&](Matrix &m) { g_tensors.push_back(&m); });

  auto loss_at = [&]() {
    const ForwardCache cache = forward(graph, params, config);
    return masked_loss(node_logits(cache), graph.labels, mask, weights);
  };

  for (size_t t = 0; t < p_tensors.size(); ++t) {
    Matrix &p = *p_tensors[t];
    Matrix &g = *g_tensors[t];
    for (size_t i = 0; i < p.size(); ++i) {
      const double orig = p.data()[i];
      p.data()[i] = orig + step;
      const double up = loss_at();
      p.data()[i] = orig - step;
      const double down = loss_at();
      p.data()[i] = orig;
      g.data()[i] = (up - down) / (2.0 * step);
    }
  }
  return grads;
}

AdamState adam_init(const Params &params) {
  AdamState state;
  state.m = zeros_like(params);
  state.v = zeros_like(params);
  return state;
}

void adam_step(Params &params, const Params &grads, AdamState &state, double lr) {
  std::vector<Matrix *> p_tensors, m_tensors, v_tensors;
  std::vector<const Matrix *> g_tensors;
  params.for_each_tensor([&](Matrix &m) { p_tensors.push_back(&m); });
  state.m.for_each_tensor([&](Matrix &m) { m_tensors.push_back(&m); });
  state.v.for_each_tensor([&](Matrix &m) { v_tensors.push_back(&m); });
  grads.for_each_tensor([&](const Matrix &m) { g_tensors.push_back(&m); });

  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

  for (size_t t = 0; t < p_tensors.size(); ++t) {
    Matrix &p = *p_tensors[t];
    const Matrix &g = *g_tensors[t];
    Matrix &m = *m_tensors[t];
    Matrix &v = *v_tensors[t];
    if (!p.same_shape(g) || !p.same_shape(m) || !p.same_shape(v)) {
      throw InternalError("internal-consistency error: optimizer state shape mismatch");
    }
    for (size_t i = 0; i < p.size(); ++i) {
      const double gi = g.data()[i];
      if (!std::isfinite(gi)) {
        throw TrainError("numeric-overflow error: non-finite gradient");
      }
      m.data()[i] = state.beta1 * m.data()[i] + (1.0 - state.beta1) * gi;
      v.data()[i] = state.beta2 * v.data()[i] + (1.0 - state.beta2) * gi * gi;
      const double m_hat = m.data()[i] / bc1;
      const double v_hat = v.data()[i] / bc2;
      p.data()[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

static bool mask_has_both_classes(const std::vector<int8_t> &labels,
                                  const std::vector<uint8_t> &mask) {
  bool pos = false, neg = false;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (!mask[i]) {
      continue;
    }
    (labels[i] == 1 ? pos : neg) = true;
  }
  return pos && neg;
}

static std::optional<double> masked_auc(const std::vector<double> &logits,
                                        const std::vector<int8_t> &labels,
                                        const std::vector<uint8_t> &mask, bool defined) {
  if (!defined) {
    return std::nullopt;
  }
  std::vector<double> scores;
  std::vector<int8_t> y;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (mask[i]) {
      scores.push_back(logits[i]);  // AUC is rank-based; logits rank like probabilities
      y.push_back(labels[i]);
    }
  }
  return roc_auc_exact(scores, y).value();
}

TrainResult train(const RelGraph &graph, const ModelConfig &config, uint64_t rng_seed) {
  config.validate();
  int64_t n_train = 0, n_val = 0;
  for (uint8_t m : graph.train_mask) {
    n_train += m;
  }
  for (uint8_t m : graph.val_mask) {
    n_val += m;
  }
  if (n_train == 0) {
    throw DataError("evaluation error: empty train mask");
  }
  if (n_val == 0) {
    throw DataError("evaluation error: empty validation mask");
  }

  const ClassWeights weights = config.class_weighting == ClassWeighting::balanced
                                   ? balanced_class_weights(graph.labels, graph.train_mask)
                                   : ClassWeights{};

  TrainResult result;
  result.params = init_params(graph.features.cols(), config, rng_seed);
  if (config.epochs == 0) {
    return result;
  }

  // When the validation mask holds a single class, AUC is undefined for the
  // whole run; epoch selection falls back to validation loss.
  const bool val_auc_defined = mask_has_both_classes(graph.labels, graph.val_mask);

  Params params = result.params;
  AdamState state = adam_init(params);
  ForwardCache cache = forward(graph, params, config);

  double best_loss = std::numeric_limits<double>::infinity();
  double best_auc = -1.0;
  result.history.reserve(static_cast<size_t>(config.epochs));

  for (int32_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const std::vector<double> logits = node_logits(cache);
    const double train_loss = masked_loss(logits, graph.labels, graph.train_mask, weights);
    if (!std::isfinite(train_loss)) {
      throw TrainError("training error: loss diverged at epoch " + std::to_string(epoch));
    }

    const Params grads = backward(graph, cache, params, config, graph.train_mask, weights);
    adam_step(params, grads, state, config.learning_rate);

    cache = forward(graph, params, config);
    const std::vector<double> post_logits = node_logits(cache);
    const double val_loss = masked_loss(post_logits, graph.labels, graph.val_mask, weights);
    if (!std::isfinite(val_loss)) {
      throw TrainError("training error: loss diverged at epoch " + std::to_string(epoch));
    }
    const std::optional<double> val_auc =
        masked_auc(post_logits, graph.labels, graph.val_mask, val_auc_defined);

    result.history.push_back({epoch, train_loss, val_loss, val_auc});

    const bool better = val_auc_defined ? *val_auc > best_auc : val_loss < best_loss;
    if (better) {
      best_auc = val_auc.value_or(-1.0);
      best_loss = val_loss;
      result.params = params;
      result.best_epoch = epoch;
      result.best_val_auc = val_auc;
    }
  }
  return result;
}

std::vector<double> predict(const RelGraph &graph, const Params &params,
                            const ModelConfig &config) {
  const ForwardCache cache = forward(graph, params, config);
  std::vector<double> probs(static_cast<size_t>(graph.n_transactions));
  for (int64_t i = 0; i < graph.n_transactions; ++i) {
    probs[static_cast<size_t>(i)] = sigmoid(cache.l2.post.at(graph.n_accounts + i, 0));
  }
  return probs;
}

static nlohmann::json flatten(const Matrix &m) {
  nlohmann::json arr = nlohmann::json::array();
  for (size_t i = 0; i < m.size(); ++i) {
    arr.push_back(m.data()[i]);
  }
  return arr;
}

static Matrix unflatten(const nlohmann::json &arr, int64_t rows, int64_t cols,
                        const std::string &what) {
  if (!arr.is_array() || arr.size() != static_cast<size_t>(rows) * static_cast<size_t>(cols)) {
    throw DataError("schema error: model parameter '" + what + "' must have " +
                    std::to_string(rows * cols) + " entries");
  }
  Matrix m(rows, cols);
  for (size_t i = 0; i < m.size(); ++i) {
    if (!arr[i].is_number()) {
      throw DataError("parse error: model parameter '" + what + "' entry " + std::to_string(i) +
                      " is not a number");
    }
    m.data()[i] = arr[i].get<double>();
    if (!std::isfinite(m.data()[i])) {
      throw DataError("parse error: model parameter '" + what + "' entry " + std::to_string(i) +
                      " is not finite");
    }
  }
  return m;
}

static nlohmann::json layer_to_json(const LayerParams &layer) {
  nlohmann::json j;
  for (size_t r = 0; r < kRelationCount; ++r) {
    j[std::string("w_") + relation_name(static_cast<Relation>(r))] = flatten(layer.w_rel[r]);
  }
  j["w_self"] = flatten(layer.w_self);
  j["bias"] = flatten(layer.bias);
  return j;
}

static LayerParams layer_from_json(const nlohmann::json &j, int64_t d_in, int64_t d_out,
                                   const std::string &name) {
  LayerParams layer;
  for (size_t r = 0; r < kRelationCount; ++r) {
    const std::string key = std::string("w_") + relation_name(static_cast<Relation>(r));
    layer.w_rel[r] = unflatten(j.at(key), d_in, d_out, name + "." + key);
  }
  layer.w_self = unflatten(j.at("w_self"), d_in, d_out, name + ".w_self");
  layer.bias = unflatten(j.at("bias"), 1, d_out, name + ".bias");
  return layer;
}

void save_model(const ModelCheckpoint &ckpt, const std::filesystem::path &path) {
  nlohmann::json j;
  j["format"] = "rgcn-checkpoint";
  j["version"] = kVersion;
  j["seed"] = ckpt.seed;
  j["model"] = {{"d_in", static_cast<int64_t>(ckpt.layout.width())},
                {"hidden_dim", ckpt.config.hidden_dim},
                {"d_out", 1},
                {"aggregation", aggregation_name(ckpt.config.aggregation)},
                {"epochs", ckpt.config.epochs},
                {"learning_rate", ckpt.config.learning_rate},
                {"class_weighting", class_weighting_name(ckpt.config.class_weighting)}};
  nlohmann::json layout;
  layout["mode"] = feature_mode_name(ckpt.layout.mode);
  layout["countries"] = ckpt.layout.countries;
  layout["n_types"] = ckpt.layout.n_types;
  layout["log_value_mean"] = ckpt.layout.log_value_mean;
  layout["log_value_std"] = ckpt.layout.log_value_std;
  if (ckpt.layout.mode == FeatureMode::hybrid) {
    nlohmann::json ind = nlohmann::json::array();
    for (const auto &row : ckpt.layout.indicators) {
      ind.push_back(row);
    }
    layout["indicators"] = ind;
  }
  j["layout"] = layout;
  j["params"] = {{"conv1", layer_to_json(ckpt.params.conv1)},
                 {"conv2", layer_to_json(ckpt.params.conv2)}};
  io::atomic_write_file(path, j.dump(2) + "\n");
}

ModelCheckpoint load_model(const std::filesystem::path &path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception &e) {
    throw DataError("parse error: '" + path.string() + "': " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "rgcn-checkpoint") {
      throw DataError("schema error: '" + path.string() + "' is not a model checkpoint");
    }
    ModelCheckpoint ckpt;
    ckpt.seed = j.at("seed").get<uint64_t>();
    const auto &model = j.at("model");
    ckpt.config.hidden_dim = model.at("hidden_dim").get<int32_t>();
    ckpt.config.aggregation = aggregation_from_name(model.at("aggregation").get<std::string>());
    ckpt.config.epochs = model.at("epochs").get<int32_t>();
    ckpt.config.learning_rate = model.at("learning_rate").get<double>();
    ckpt.config.class_weighting =
        class_weighting_from_name(model.at("class_weighting").get<std::string>());

    const auto &layout = j.at("layout");
    ckpt.layout.mode = feature_mode_from_name(layout.at("mode").get<std::string>());
    ckpt.layout.countries = layout.at("countries").get<std::vector<std::string>>();
    ckpt.layout.n_types = layout.at("n_types").get<int32_t>();
    ckpt.layout.log_value_mean = layout.at("log_value_mean").get<double>();
    ckpt.layout.log_value_std = layout.at("log_value_std").get<double>();
    if (ckpt.layout.mode == FeatureMode::hybrid) {
      const auto &ind = layout.at("indicators");
      if (!ind.is_array() || ind.size() != ckpt.layout.countries.size()) {
        throw DataError("schema error: '" + path.string() +
                        "': indicators must have one row per country");
      }
      for (const auto &row : ind) {
        ckpt.layout.indicators.push_back(row.get<std::array<double, kIndicatorCount>>());
      }
    }

    const int64_t d_in = static_cast<int64_t>(ckpt.layout.width());
    const int64_t declared = model.at("d_in").get<int64_t>();
    if (declared != d_in) {
      throw DataError("schema error: '" + path.string() + "': d_in " + std::to_string(declared) +
                      " does not match the feature layout width " + std::to_string(d_in));
    }
    ckpt.config.validate();
    ckpt.params.conv1 =
        layer_from_json(j.at("params").at("conv1"), d_in, ckpt.config.hidden_dim, "conv1");
    ckpt.params.conv2 =
        layer_from_json(j.at("params").at("conv2"), ckpt.config.hidden_dim, 1, "conv2");
    return ckpt;
  } catch (const nlohmann::json::exception &e) {
    throw DataError("schema error: '" + path.string() + "': " + e.what());
  }
}

}  // namespace aml
