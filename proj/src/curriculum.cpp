#include "sadkit/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "sadkit/losses.hpp"

namespace sadkit {

double complexity(double len_r, double len_a, double entropy, double alpha, double beta,
                  double gamma) {
  return alpha * len_r + beta * len_a + gamma * entropy;
}

std::vector<double> linear_pacing(int epochs, double start_fraction) {
  if (epochs < 1) throw SadError(ErrorKind::BadConfig, "epochs must be >= 1");
  std::vector<double> pacing(epochs);
  for (int e = 1; e <= epochs; ++e) {
    pacing[e - 1] = std::min(
        1.0, start_fraction + (1.0 - start_fraction) * static_cast<double>(e) / epochs);
  }
  return pacing;
}

std::size_t CurriculumPlan::available(int epoch) const {
  if (epoch < 1 || epoch > epochs()) {
    throw SadError(ErrorKind::BadConfig, "epoch outside pacing schedule");
  }
  const double frac = pacing[static_cast<std::size_t>(epoch - 1)];
  const auto n = static_cast<std::size_t>(
      std::ceil(frac * static_cast<double>(order.size())));
  return std::max<std::size_t>(1, std::min(n, order.size()));
}

std::vector<std::size_t> CurriculumPlan::epoch_samples(int epoch, std::size_t n_draws) const {
  const std::size_t avail = available(epoch);
  // Epoch-keyed stream so resumption can regenerate any epoch independently.
  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(epoch)));
  std::uniform_int_distribution<std::size_t> pick(0, avail - 1);
  std::vector<std::size_t> draws(n_draws);
  for (std::size_t i = 0; i < n_draws; ++i) draws[i] = order[pick(rng)].corpus_index;
  return draws;
}

void CurriculumPlan::save_json(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw SadError(ErrorKind::IoError, "cannot write " + path);
  nlohmann::json ids = nlohmann::json::array();
  for (const ScoredTrajectory& s : order) ids.push_back(s.task_id);
  nlohmann::json j{{"alpha", alpha},  {"beta", beta},     {"gamma", gamma},
                   {"order", ids},    {"pacing", pacing}, {"seed", seed}};
  out << j.dump() << '\n';
}

CurriculumPlan build_plan(std::vector<ScoredTrajectory> scored, std::vector<double> pacing,
                          std::uint64_t seed, double alpha, double beta, double gamma) {
  if (scored.empty()) throw SadError(ErrorKind::EmptyCorpus, "build_plan on empty corpus");
  if (pacing.empty()) throw SadError(ErrorKind::BadConfig, "empty pacing schedule");
  std::sort(scored.begin(), scored.end(), [](const ScoredTrajectory& a,
                                             const ScoredTrajectory& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.task_id < b.task_id;
  });
  CurriculumPlan plan;
  plan.alpha = alpha;
  plan.beta = beta;
  plan.gamma = gamma;
  plan.seed = seed;
  plan.order = std::move(scored);
  plan.pacing = std::move(pacing);
  return plan;
}

std::vector<ScoredTrajectory> score_corpus(const std::vector<PreprocessedTrajectory>& corpus,
                                           int vocab_size, double teacher_eps, double alpha,
                                           double beta, double gamma) {
  // With eps-smoothed one-hot targets every supervised row has the same
  // entropy; computed once and reused.
  const Eigen::VectorXd log_p = smoothed_onehot_log_probs(vocab_size, 0, teacher_eps);
  const double row_entropy = -(log_p.array().exp() * log_p.array()).sum();

  std::vector<ScoredTrajectory> scored;
  scored.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    ScoredTrajectory s;
    s.task_id = corpus[i].task_id;
    s.corpus_index = i;
    s.len_r = static_cast<double>(corpus[i].masks.reason_count());
    s.len_a = static_cast<double>(corpus[i].masks.action_count());
    s.entropy = (s.len_r + s.len_a) > 0.0 ? row_entropy : 0.0;
    s.score = complexity(s.len_r, s.len_a, s.entropy, alpha, beta, gamma);
    scored.push_back(std::move(s));
  }
  return scored;
}

}  // namespace sadkit
