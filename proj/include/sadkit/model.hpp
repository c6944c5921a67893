#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sadkit/common.hpp"

namespace sadkit {

struct ModelConfig {
  int vocab_size = 0;
  int embed_dim = 8;
  int context_window = 20;
  int hidden_dim = 64;
  std::uint64_t seed = 0;

  bool operator==(const ModelConfig&) const = default;
};

// Fixed-window embedding-concatenation MLP language model.
// Position t is predicted from tokens [t-w, t), BOS-padded on the left:
//   c_t = concat(E[x_{t-w}], ..., E[x_{t-1}])
//   h_t = tanh(W1^T c_t + b1)
//   logits_t = W2^T h_t + b2
struct ModelParams {
  ModelConfig config;
  Eigen::MatrixXd embed;  // V x d
  Eigen::MatrixXd w1;     // (w*d) x h
  Eigen::VectorXd b1;     // h
  Eigen::MatrixXd w2;     // h x V
  Eigen::VectorXd b2;     // V

  std::size_t param_count() const;
};

struct ParamGradients {
  Eigen::MatrixXd embed;
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;

  static ParamGradients zeros_like(const ModelParams& params);
  void accumulate(const ParamGradients& other);
  void scale(double factor);
  double squared_norm() const;
};

ModelParams init_params(const ModelConfig& config);

// Full forward: T x V logits, row t predicting token_ids[t].
Eigen::MatrixXd forward(const ModelParams& params, std::span<const int> token_ids);

// Row-subset forward used by the trainer (loss only touches masked rows) and
// by single-position decoding. Caches intermediates for the backward pass.
struct ForwardCache {
  std::vector<int> rows;
  Eigen::MatrixXd ctx;     // |rows| x (w*d)
  Eigen::MatrixXd hidden;  // |rows| x h
  Eigen::MatrixXd logits;  // |rows| x V
};

ForwardCache forward_rows(const ModelParams& params, std::span<const int> token_ids,
                          std::vector<int> rows);

// dlogits has one row per cached row, in the same order.
ParamGradients backward_rows(const ModelParams& params, std::span<const int> token_ids,
                             const ForwardCache& cache, const Eigen::MatrixXd& dlogits);

// Full-sequence backward: dlogits is T x V.
ParamGradients backward(const ModelParams& params, std::span<const int> token_ids,
                        const Eigen::MatrixXd& dlogits);

// Argmax extension (ties broken toward the lowest id), stopping at stop_id.
std::vector<int> greedy_decode(const ModelParams& params, std::span<const int> prompt_ids,
                               int max_len, int stop_id);

// Next-token argmax for a running transcript.
int predict_next(const ModelParams& params, std::span<const int> token_ids);

void save_params_json(const ModelParams& params, const std::string& path);
ModelParams load_params_json(const std::string& path);

// JSON form, embedded by trainer checkpoints.
nlohmann::json params_to_json(const ModelParams& params);
ModelParams params_from_json(const nlohmann::json& j);

}  // namespace sadkit
