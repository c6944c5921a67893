#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sadkit/common.hpp"
#include "sadkit/supervision.hpp"

namespace sadkit {

struct ScoredTrajectory {
  std::string task_id;
  std::size_t corpus_index = 0;
  double len_r = 0.0;
  double len_a = 0.0;
  double entropy = 0.0;  // mean teacher entropy over supervised positions
  double score = 0.0;    // alpha*len_r + beta*len_a + gamma*entropy
};

double complexity(double len_r, double len_a, double entropy, double alpha, double beta,
                  double gamma);

// pacing(e) for e in [1, epochs]: fraction of the sorted corpus available.
std::vector<double> linear_pacing(int epochs, double start_fraction = 0.3);

struct CurriculumPlan {
  double alpha = 1.0, beta = 1.0, gamma = 1.0;
  std::uint64_t seed = 0;
  std::vector<ScoredTrajectory> order;  // ascending score, ties by task_id
  std::vector<double> pacing;           // per epoch, monotone non-decreasing

  int epochs() const { return static_cast<int>(pacing.size()); }

  // Size of the available prefix at 1-based epoch e.
  std::size_t available(int epoch) const;

  // n_draws uniform (seeded, epoch-keyed) draws from the available prefix;
  // returns corpus indices.
  std::vector<std::size_t> epoch_samples(int epoch, std::size_t n_draws) const;

  void save_json(const std::string& path) const;
};

CurriculumPlan build_plan(std::vector<ScoredTrajectory> scored, std::vector<double> pacing,
                          std::uint64_t seed, double alpha, double beta, double gamma);

// Scores a preprocessed corpus under the scripted-teacher target distribution
// (per-position entropy from eps-smoothed one-hot rows).
std::vector<ScoredTrajectory> score_corpus(const std::vector<PreprocessedTrajectory>& corpus,
                                           int vocab_size, double teacher_eps, double alpha,
                                           double beta, double gamma);

}  // namespace sadkit
