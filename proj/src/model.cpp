#include "sadkit/model.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "sadkit/tokenizer.hpp"

namespace sadkit {

namespace {
constexpr const char* kModelVersion = "sadkit-model-v1";
}

std::size_t ModelParams::param_count() const {
  return static_cast<std::size_t>(embed.size()) + w1.size() + b1.size() + w2.size() + b2.size();
}

ParamGradients ParamGradients::zeros_like(const ModelParams& p) {
  ParamGradients g;
  g.embed = Eigen::MatrixXd::Zero(p.embed.rows(), p.embed.cols());
  g.w1 = Eigen::MatrixXd::Zero(p.w1.rows(), p.w1.cols());
  g.b1 = Eigen::VectorXd::Zero(p.b1.size());
  g.w2 = Eigen::MatrixXd::Zero(p.w2.rows(), p.w2.cols());
  g.b2 = Eigen::VectorXd::Zero(p.b2.size());
  return g;
}

void ParamGradients::accumulate(const ParamGradients& other) {
  embed += other.embed;
  w1 += other.w1;
  b1 += other.b1;
  w2 += other.w2;
  b2 += other.b2;
}

void ParamGradients::scale(double factor) {
  embed *= factor;
  w1 *= factor;
  b1 *= factor;
  w2 *= factor;
  b2 *= factor;
}

double ParamGradients::squared_norm() const {
  return embed.squaredNorm() + w1.squaredNorm() + b1.squaredNorm() + w2.squaredNorm() +
         b2.squaredNorm();
}

ModelParams init_params(const ModelConfig& config) {
  if (config.vocab_size < 1 || config.embed_dim < 1 || config.context_window < 1 ||
      config.hidden_dim < 1) {
    throw SadError(ErrorKind::BadConfig, "model dimensions must be >= 1");
  }
  const int V = config.vocab_size;
  const int d = config.embed_dim;
  const int w = config.context_window;
  const int h = config.hidden_dim;

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> uniform(-0.05, 0.05);
  const auto fill = [&rng, &uniform](Eigen::MatrixXd& m, double fan_in) {
    const double scale = 1.0 / std::sqrt(fan_in);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = uniform(rng) * scale;
    }
  };

  ModelParams params;
  params.config = config;
  params.embed.resize(V, d);
  fill(params.embed, 1.0);
  params.w1.resize(w * d, h);
  fill(params.w1, static_cast<double>(w * d));
  params.b1 = Eigen::VectorXd::Zero(h);
  params.w2.resize(h, V);
  fill(params.w2, static_cast<double>(h));
  params.b2 = Eigen::VectorXd::Zero(V);
  return params;
}

namespace {

void check_ids(const ModelParams& params, std::span<const int> ids) {
  for (int id : ids) {
    if (id < 0 || id >= params.config.vocab_size) {
      throw SadError(ErrorKind::IdOutOfRange,
                     "token id " + std::to_string(id) + " outside vocab of size " +
                         std::to_string(params.config.vocab_size));
    }
  }
}

// Row r of ctx = concatenated embeddings of the w tokens left of position rows[r].
Eigen::MatrixXd gather_contexts(const ModelParams& params, std::span<const int> ids,
                                const std::vector<int>& rows) {
  const int d = params.config.embed_dim;
  const int w = params.config.context_window;
  Eigen::MatrixXd ctx(static_cast<Eigen::Index>(rows.size()), w * d);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int t = rows[r];
    for (int k = 0; k < w; ++k) {
      const int j = t - w + k;
      const int id = j >= 0 ? ids[static_cast<std::size_t>(j)] : Vocab::kBos;
      ctx.block(static_cast<Eigen::Index>(r), k * d, 1, d) = params.embed.row(id);
    }
  }
  return ctx;
}

}  // namespace

ForwardCache forward_rows(const ModelParams& params, std::span<const int> token_ids,
                          std::vector<int> rows) {
  check_ids(params, token_ids);
  for (int t : rows) {
    if (t < 0 || t >= static_cast<int>(token_ids.size())) {
      throw SadError(ErrorKind::ShapeMismatch, "forward row outside sequence");
    }
  }
  ForwardCache cache;
  cache.rows = std::move(rows);
  cache.ctx = gather_contexts(params, token_ids, cache.rows);
  cache.hidden =
      ((cache.ctx * params.w1).rowwise() + params.b1.transpose()).array().tanh().matrix();
  cache.logits = (cache.hidden * params.w2).rowwise() + params.b2.transpose();
  return cache;
}

Eigen::MatrixXd forward(const ModelParams& params, std::span<const int> token_ids) {
  std::vector<int> rows(token_ids.size());
  for (std::size_t t = 0; t < token_ids.size(); ++t) rows[t] = static_cast<int>(t);
  return forward_rows(params, token_ids, std::move(rows)).logits;
}

ParamGradients backward_rows(const ModelParams& params, std::span<const int> token_ids,
                             const ForwardCache& cache, const Eigen::MatrixXd& dlogits) {
  if (dlogits.rows() != static_cast<Eigen::Index>(cache.rows.size()) ||
      dlogits.cols() != params.config.vocab_size) {
    throw SadError(ErrorKind::ShapeMismatch, "dlogits shape mismatch");
  }
  const int d = params.config.embed_dim;
  const int w = params.config.context_window;

  ParamGradients grads = ParamGradients::zeros_like(params);
  grads.w2 = cache.hidden.transpose() * dlogits;
  grads.b2 = dlogits.colwise().sum().transpose();

  const Eigen::MatrixXd dhidden =
      ((dlogits * params.w2.transpose()).array() * (1.0 - cache.hidden.array().square()))
          .matrix();
  grads.w1 = cache.ctx.transpose() * dhidden;
  grads.b1 = dhidden.colwise().sum().transpose();

  const Eigen::MatrixXd dctx = dhidden * params.w1.transpose();
  for (std::size_t r = 0; r < cache.rows.size(); ++r) {
    const int t = cache.rows[r];
    for (int k = 0; k < w; ++k) {
      const int j = t - w + k;
      const int id = j >= 0 ? token_ids[static_cast<std::size_t>(j)] : Vocab::kBos;
      grads.embed.row(id) += dctx.block(static_cast<Eigen::Index>(r), k * d, 1, d);
    }
  }
  return grads;
}

ParamGradients backward(const ModelParams& params, std::span<const int> token_ids,
                        const Eigen::MatrixXd& dlogits) {
  if (dlogits.rows() != static_cast<Eigen::Index>(token_ids.size())) {
    throw SadError(ErrorKind::ShapeMismatch, "dlogits row count != sequence length");
  }
  std::vector<int> rows(token_ids.size());
  for (std::size_t t = 0; t < token_ids.size(); ++t) rows[t] = static_cast<int>(t);
  ForwardCache cache = forward_rows(params, token_ids, std::move(rows));
  return backward_rows(params, token_ids, cache, dlogits);
}

int predict_next(const ModelParams& params, std::span<const int> token_ids) {
  // Next-token logits = logits for a virtual position at the sequence end.
  std::vector<int> extended(token_ids.begin(), token_ids.end());
  extended.push_back(Vocab::kPad);  // placeholder target, never read by the forward pass
  ForwardCache cache =
      forward_rows(params, extended, {static_cast<int>(extended.size()) - 1});
  int best = 0;
  double best_score = cache.logits(0, 0);
  for (int v = 1; v < params.config.vocab_size; ++v) {
    if (cache.logits(0, v) > best_score) {
      best_score = cache.logits(0, v);
      best = v;
    }
  }
  return best;
}

std::vector<int> greedy_decode(const ModelParams& params, std::span<const int> prompt_ids,
                               int max_len, int stop_id) {
  if (prompt_ids.empty()) {
    throw SadError(ErrorKind::ShapeMismatch, "greedy_decode requires a non-empty prompt");
  }
  std::vector<int> out(prompt_ids.begin(), prompt_ids.end());
  for (int i = 0; i < max_len; ++i) {
    const int next = predict_next(params, out);
    out.push_back(next);
    if (next == stop_id) break;
  }
  return out;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) {
      throw SadError(ErrorKind::CorruptFile, "ragged matrix in checkpoint");
    }
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i];
  return v;
}

}  // namespace

nlohmann::json params_to_json(const ModelParams& params);

nlohmann::json params_to_json(const ModelParams& params) {
  return nlohmann::json{
      {"version", kModelVersion},
      {"config",
       {{"vocab_size", params.config.vocab_size},
        {"embed_dim", params.config.embed_dim},
        {"context_window", params.config.context_window},
        {"hidden_dim", params.config.hidden_dim},
        {"seed", params.config.seed}}},
      {"embed", matrix_to_json(params.embed)},
      {"w1", matrix_to_json(params.w1)},
      {"b1", vector_to_json(params.b1)},
      {"w2", matrix_to_json(params.w2)},
      {"b2", vector_to_json(params.b2)}};
}

ModelParams params_from_json(const nlohmann::json& j);

ModelParams params_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("version")) {
    throw SadError(ErrorKind::CorruptFile, "not a model checkpoint");
  }
  if (j.at("version").get<std::string>() != kModelVersion) {
    throw SadError(ErrorKind::VersionMismatch,
                   "checkpoint version " + j.at("version").get<std::string>());
  }
  ModelParams params;
  const auto& c = j.at("config");
  params.config.vocab_size = c.at("vocab_size").get<int>();
  params.config.embed_dim = c.at("embed_dim").get<int>();
  params.config.context_window = c.at("context_window").get<int>();
  params.config.hidden_dim = c.at("hidden_dim").get<int>();
  params.config.seed = c.at("seed").get<std::uint64_t>();
  params.embed = matrix_from_json(j.at("embed"));
  params.w1 = matrix_from_json(j.at("w1"));
  params.b1 = vector_from_json(j.at("b1"));
  params.w2 = matrix_from_json(j.at("w2"));
  params.b2 = vector_from_json(j.at("b2"));
  if (params.embed.rows() != params.config.vocab_size ||
      params.embed.cols() != params.config.embed_dim ||
      params.w1.rows() !=
          static_cast<Eigen::Index>(params.config.context_window) * params.config.embed_dim ||
      params.w1.cols() != params.config.hidden_dim ||
      params.w2.rows() != params.config.hidden_dim ||
      params.w2.cols() != params.config.vocab_size ||
      params.b1.size() != params.config.hidden_dim ||
      params.b2.size() != params.config.vocab_size) {
    throw SadError(ErrorKind::CorruptFile, "checkpoint shapes inconsistent with config");
  }
  return params;
}

void save_params_json(const ModelParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SadError(ErrorKind::IoError, "cannot write " + path);
  out << params_to_json(params).dump() << '\n';
  if (!out) throw SadError(ErrorKind::IoError, "write failed: " + path);
}

ModelParams load_params_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SadError(ErrorKind::IoError, "cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw SadError(ErrorKind::CorruptFile, "invalid checkpoint: " + path);
  return params_from_json(j);
}

}  // namespace sadkit
