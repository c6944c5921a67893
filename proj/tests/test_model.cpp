#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "sadkit/losses.hpp"
#include "sadkit/model.hpp"
#include "sadkit/tokenizer.hpp"

using namespace sadkit;

namespace {

ModelConfig small_config() {
  ModelConfig cfg;
  cfg.vocab_size = 11;
  cfg.embed_dim = 8;
  cfg.context_window = 4;
  cfg.hidden_dim = 16;
  cfg.seed = 123;
  return cfg;
}

std::vector<int> random_ids(std::mt19937_64& rng, int len, int vocab) {
  std::vector<int> ids(static_cast<std::size_t>(len));
  for (int& id : ids) id = static_cast<int>(rng() % static_cast<std::uint64_t>(vocab));
  return ids;
}

// Scalar loss used by the finite-difference check: sum_t w_t . logits_t
// with fixed random weights, so dLoss/dLogits is the weight matrix itself.
double weighted_logit_sum(const ModelParams& params, const std::vector<int>& ids,
                          const Eigen::MatrixXd& weights) {
  const Eigen::MatrixXd logits = forward(params, ids);
  return (logits.array() * weights.array()).sum();
}

}  // namespace

TEST_CASE("init is seed-deterministic and shape-correct") {
  const ModelConfig cfg = small_config();
  const ModelParams a = init_params(cfg);
  const ModelParams b = init_params(cfg);
  CHECK(a.embed == b.embed);
  CHECK(a.w1 == b.w1);
  CHECK(a.w2 == b.w2);

  ModelConfig other = cfg;
  other.seed = 999;
  const ModelParams c = init_params(other);
  CHECK(a.embed != c.embed);

  // Closed-form parameter count: V*d + w*d*h + h + h*V + V.
  const std::size_t expected = 11 * 8 + 4 * 8 * 16 + 16 + 16 * 11 + 11;
  CHECK(a.param_count() == expected);
  CHECK(a.b1.isZero());
  CHECK(a.b2.isZero());
}

TEST_CASE("zero weights give uniform softmax rows") {
  ModelParams params = init_params(small_config());
  params.embed.setZero();
  params.w1.setZero();
  params.w2.setZero();
  const std::vector<int> ids = {1, 2, 3, 4, 5};
  const Eigen::MatrixXd logits = forward(params, ids);
  CHECK(logits.isZero());
  const Eigen::VectorXd p = log_softmax(logits.row(0).transpose()).array().exp();
  for (int v = 0; v < 11; ++v) CHECK(p(v) == doctest::Approx(1.0 / 11).epsilon(1e-12));
}

TEST_CASE("softmax rows sum to one") {
  const ModelParams params = init_params(small_config());
  std::mt19937_64 rng(7);
  const std::vector<int> ids = random_ids(rng, 9, 11);
  const Eigen::MatrixXd logits = forward(params, ids);
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const Eigen::VectorXd p = log_softmax(logits.row(t).transpose()).array().exp();
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("causality: perturbing token t leaves rows <= t unchanged") {
  const ModelParams params = init_params(small_config());
  std::mt19937_64 rng(8);
  std::vector<int> ids = random_ids(rng, 10, 11);
  const Eigen::MatrixXd base = forward(params, ids);
  for (std::size_t t = 0; t < ids.size(); ++t) {
    std::vector<int> perturbed = ids;
    perturbed[t] = (perturbed[t] + 1) % 11;
    const Eigen::MatrixXd alt = forward(params, perturbed);
    for (std::size_t u = 0; u <= t; ++u) {
      CHECK((base.row(static_cast<Eigen::Index>(u)) -
             alt.row(static_cast<Eigen::Index>(u)))
                .cwiseAbs()
                .maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("id out of range is rejected") {
  const ModelParams params = init_params(small_config());
  CHECK_THROWS_AS(forward(params, std::vector<int>{1, 11}), SadError);
  CHECK_THROWS_AS(forward(params, std::vector<int>{-1}), SadError);
}

TEST_CASE("zero upstream gradient gives zero parameter gradients") {
  const ModelParams params = init_params(small_config());
  std::mt19937_64 rng(9);
  const std::vector<int> ids = random_ids(rng, 6, 11);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(6, 11);
  const ParamGradients grads = backward(params, ids, zero);
  CHECK(grads.squared_norm() == 0.0);
}

TEST_CASE("analytic gradients match central finite differences") {
  const ModelParams params = init_params(small_config());
  std::mt19937_64 rng(10);
  const std::vector<int> ids = random_ids(rng, 8, 11);
  Eigen::MatrixXd weights(8, 11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 8; ++t) {
    for (int v = 0; v < 11; ++v) weights(t, v) = u(rng);
  }

  const ParamGradients analytic = backward(params, ids, weights);
  const double h = 1e-5;
  double max_rel_err = 0.0;
  const auto check_matrix = [&](const Eigen::MatrixXd& grad,
                                auto&& get_mutable) {
    for (Eigen::Index r = 0; r < grad.rows(); ++r) {
      for (Eigen::Index c = 0; c < grad.cols(); ++c) {
        ModelParams plus = params;
        get_mutable(plus)(r, c) += h;
        ModelParams minus = params;
        get_mutable(minus)(r, c) -= h;
        const double fd = (weighted_logit_sum(plus, ids, weights) -
                           weighted_logit_sum(minus, ids, weights)) /
                          (2.0 * h);
        const double denom = std::max({std::abs(fd), std::abs(grad(r, c)), 1e-8});
        max_rel_err = std::max(max_rel_err, std::abs(fd - grad(r, c)) / denom);
      }
    }
  };
  check_matrix(analytic.embed, [](ModelParams& p) -> Eigen::MatrixXd& { return p.embed; });
  check_matrix(analytic.w1, [](ModelParams& p) -> Eigen::MatrixXd& { return p.w1; });
  check_matrix(analytic.w2, [](ModelParams& p) -> Eigen::MatrixXd& { return p.w2; });
  // Biases via the same central-difference scheme.
  for (Eigen::Index i = 0; i < analytic.b1.size(); ++i) {
    ModelParams plus = params;
    plus.b1(i) += h;
    ModelParams minus = params;
    minus.b1(i) -= h;
    const double fd = (weighted_logit_sum(plus, ids, weights) -
                       weighted_logit_sum(minus, ids, weights)) /
                      (2.0 * h);
    const double denom = std::max({std::abs(fd), std::abs(analytic.b1(i)), 1e-8});
    max_rel_err = std::max(max_rel_err, std::abs(fd - analytic.b1(i)) / denom);
  }
  for (Eigen::Index i = 0; i < analytic.b2.size(); ++i) {
    ModelParams plus = params;
    plus.b2(i) += h;
    ModelParams minus = params;
    minus.b2(i) -= h;
    const double fd = (weighted_logit_sum(plus, ids, weights) -
                       weighted_logit_sum(minus, ids, weights)) /
                      (2.0 * h);
    const double denom = std::max({std::abs(fd), std::abs(analytic.b2(i)), 1e-8});
    max_rel_err = std::max(max_rel_err, std::abs(fd - analytic.b2(i)) / denom);
  }
  CHECK(max_rel_err < 1e-4);
}

TEST_CASE("forward_rows agrees with full forward") {
  const ModelParams params = init_params(small_config());
  std::mt19937_64 rng(11);
  const std::vector<int> ids = random_ids(rng, 12, 11);
  const Eigen::MatrixXd full = forward(params, ids);
  const ForwardCache cache = forward_rows(params, ids, {2, 5, 9});
  CHECK((cache.logits.row(0) - full.row(2)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((cache.logits.row(1) - full.row(5)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((cache.logits.row(2) - full.row(9)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("row-subset backward equals full backward with zeroed other rows") {
  const ModelParams params = init_params(small_config());
  std::mt19937_64 rng(12);
  const std::vector<int> ids = random_ids(rng, 10, 11);
  Eigen::MatrixXd dfull = Eigen::MatrixXd::Zero(10, 11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd drows(2, 11);
  for (int v = 0; v < 11; ++v) {
    drows(0, v) = u(rng);
    drows(1, v) = u(rng);
  }
  dfull.row(3) = drows.row(0);
  dfull.row(7) = drows.row(1);

  const ParamGradients full = backward(params, ids, dfull);
  const ForwardCache cache = forward_rows(params, ids, {3, 7});
  const ParamGradients subset = backward_rows(params, ids, cache, drows);
  CHECK((full.embed - subset.embed).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((full.w1 - subset.w1).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((full.w2 - subset.w2).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("greedy decode basics") {
  const ModelParams params = init_params(small_config());
  const std::vector<int> prompt = {1, 2, 3};
  CHECK(greedy_decode(params, prompt, 0, 0) == prompt);
  const auto a = greedy_decode(params, prompt, 8, 0);
  const auto b = greedy_decode(params, prompt, 8, 0);
  CHECK(a == b);
  CHECK(a.size() <= prompt.size() + 8);

  // Ties break toward the lowest id: all-zero params score every token equally.
  ModelParams flat = init_params(small_config());
  flat.embed.setZero();
  flat.w1.setZero();
  flat.w2.setZero();
  CHECK(predict_next(flat, prompt) == 0);
}

TEST_CASE("checkpoint save/load is bit-exact") {
  const ModelParams params = init_params(small_config());
  const std::string path = "/tmp/sadkit_test_model.json";
  save_params_json(params, path);
  const ModelParams loaded = load_params_json(path);
  CHECK(loaded.config == params.config);
  CHECK(loaded.embed == params.embed);
  CHECK(loaded.w1 == params.w1);
  CHECK(loaded.b1 == params.b1);
  CHECK(loaded.w2 == params.w2);
  CHECK(loaded.b2 == params.b2);
  std::remove(path.c_str());
}
