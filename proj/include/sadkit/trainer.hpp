#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sadkit/common.hpp"
#include "sadkit/curriculum.hpp"
#include "sadkit/losses.hpp"
#include "sadkit/model.hpp"
#include "sadkit/supervision.hpp"

namespace sadkit {

enum class Variant { Full, ReasonOnly, ActOnly, NoSegmentation, RandomMask };

std::string_view to_string(Variant variant);
Variant variant_from_string(const std::string& name);
std::string_view to_string(LossMode mode);
LossMode loss_mode_from_string(const std::string& name);

struct TrainConfig {
  int epochs = 20;
  double lr = 0.1;
  int batch_size = 8;
  double lambda_r = 1.0;
  double lambda_a = 1.0;
  LossMode loss_mode = LossMode::KL;
  Variant variant = Variant::Full;
  double clip = 1.0;  // global gradient norm
  std::uint64_t seed = 0;
  double teacher_eps = 0.05;
  std::string teacher_checkpoint;  // empty: scripted-teacher targets
  ModelConfig model;

  void validate() const;
};

struct StepLog {
  int step = 0;
  double cot = 0.0;
  double act = 0.0;
  double total = 0.0;
};

struct TrainLog {
  std::vector<StepLog> steps;
  double wall_seconds = 0.0;

  void save_csv(const std::string& path) const;
};

// Full/ReasonOnly/ActOnly/NoSegmentation are deterministic; RandomMask
// permutes both mask vectors over all positions with the given seed,
// preserving per-label counts.
SupervisionMasks apply_variant(const SupervisionMasks& masks, Variant variant,
                               std::uint64_t seed);

// Global-norm clip then theta <- theta - lr * g.
void sgd_step(ModelParams& params, const ParamGradients& grads, double lr, double clip);

struct TrainerState {
  ModelParams params;
  TrainConfig config;
  int epoch = 1;         // next epoch to run (1-based)
  int epoch_pos = 0;     // trajectories consumed within the current epoch
  int step = 0;          // optimizer steps taken
  TrainLog log;
};

void save_checkpoint(const TrainerState& state, const std::string& path);
TrainerState load_checkpoint(const std::string& path);

struct TrainResult {
  ModelParams params;
  TrainLog log;
};

// Runs the training loop from the given state until the epoch schedule is
// exhausted or stop_after_steps optimizer steps have been taken. Per epoch,
// |corpus| trajectories are drawn from the curriculum's available prefix and
// batched; each batch is one masked-loss SGD step.
TrainerState run_training(const std::vector<PreprocessedTrajectory>& corpus,
                          const CurriculumPlan& plan, TrainerState state,
                          std::optional<int> stop_after_steps = std::nullopt);

TrainResult train(const std::vector<PreprocessedTrajectory>& corpus,
                  const CurriculumPlan& plan, ModelParams params, const TrainConfig& config);

}  // namespace sadkit
