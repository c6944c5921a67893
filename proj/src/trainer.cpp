#include "sadkit/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <json.hpp>

namespace sadkit {

namespace {
constexpr const char* kCheckpointVersion = "sadkit-ckpt-v1";
}

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::Full: return "full";
    case Variant::ReasonOnly: return "reason_only";
    case Variant::ActOnly: return "act_only";
    case Variant::NoSegmentation: return "no_segmentation";
    case Variant::RandomMask: return "random_mask";
  }
  return "full";
}

Variant variant_from_string(const std::string& name) {
  if (name == "full") return Variant::Full;
  if (name == "reason_only") return Variant::ReasonOnly;
  if (name == "act_only") return Variant::ActOnly;
  if (name == "no_segmentation") return Variant::NoSegmentation;
  if (name == "random_mask") return Variant::RandomMask;
  throw SadError(ErrorKind::BadConfig, "unknown variant: " + name);
}

std::string_view to_string(LossMode mode) { return mode == LossMode::KL ? "kl" : "ce"; }

LossMode loss_mode_from_string(const std::string& name) {
  if (name == "kl") return LossMode::KL;
  if (name == "ce") return LossMode::CE;
  throw SadError(ErrorKind::BadConfig, "unknown loss mode: " + name);
}

void TrainConfig::validate() const {
  if (epochs < 1) throw SadError(ErrorKind::BadConfig, "epochs must be >= 1");
  if (lr <= 0.0) throw SadError(ErrorKind::BadConfig, "lr must be > 0");
  if (batch_size < 1) throw SadError(ErrorKind::BadConfig, "batch_size must be >= 1");
  if (clip <= 0.0) throw SadError(ErrorKind::BadConfig, "clip must be > 0");
  if (lambda_r < 0.0 || lambda_a < 0.0) {
    throw SadError(ErrorKind::NegativeWeight, "lambda weights must be >= 0");
  }
  if (teacher_eps < 0.0 || teacher_eps >= 1.0) {
    throw SadError(ErrorKind::BadConfig, "teacher_eps must be in [0, 1)");
  }
}

void TrainLog::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw SadError(ErrorKind::IoError, "cannot write " + path);
  out << "step,cot,act,total\n";
  for (const StepLog& s : steps) {
    out << s.step << ',' << s.cot << ',' << s.act << ',' << s.total << '\n';
  }
}

SupervisionMasks apply_variant(const SupervisionMasks& masks, Variant variant,
                               std::uint64_t seed) {
  SupervisionMasks out = masks;
  switch (variant) {
    case Variant::Full:
      break;
    case Variant::ReasonOnly:
      std::fill(out.m_a.begin(), out.m_a.end(), 0);
      break;
    case Variant::ActOnly:
      std::fill(out.m_r.begin(), out.m_r.end(), 0);
      break;
    case Variant::NoSegmentation:
      // Union mask as a flat token-level loss carried by m_r.
      for (std::size_t t = 0; t < out.size(); ++t) {
        out.m_r[t] = static_cast<std::uint8_t>(out.m_r[t] | out.m_a[t]);
        out.m_a[t] = 0;
      }
      break;
    case Variant::RandomMask: {
      // Supervision lands on random positions instead of the aligned spans;
      // per-label totals are preserved.
      std::vector<std::size_t> perm(out.size());
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::mt19937_64 rng(seed);
      for (std::size_t i = perm.size(); i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(perm[i - 1], perm[pick(rng)]);
      }
      std::fill(out.m_r.begin(), out.m_r.end(), 0);
      std::fill(out.m_a.begin(), out.m_a.end(), 0);
      for (std::size_t t = 0; t < masks.size(); ++t) {
        if (masks.m_r[t]) out.m_r[perm[t]] = 1;
        if (masks.m_a[t]) out.m_a[perm[t]] = 1;
      }
      break;
    }
  }
  return out;
}

void sgd_step(ModelParams& params, const ParamGradients& grads, double lr, double clip) {
  if (lr <= 0.0 || clip <= 0.0) {
    throw SadError(ErrorKind::BadConfig, "sgd_step requires lr > 0 and clip > 0");
  }
  double norm = std::sqrt(grads.squared_norm());
  double factor = lr;
  if (norm > clip) factor *= clip / norm;
  params.embed -= factor * grads.embed;
  params.w1 -= factor * grads.w1;
  params.b1 -= factor * grads.b1;
  params.w2 -= factor * grads.w2;
  params.b2 -= factor * grads.b2;
}

namespace {

struct TrajectoryLoss {
  double cot = 0.0;
  double act = 0.0;
  bool any = false;
  ParamGradients grads;
};

Eigen::VectorXd softmax_from_logits(const Eigen::VectorXd& logits) {
  return log_softmax(logits).array().exp();
}

// Forward + loss + gradient for one trajectory, touching only masked rows.
TrajectoryLoss trajectory_grad(const ModelParams& params, const ModelParams* teacher,
                               const PreprocessedTrajectory& rec, const TrainConfig& cfg) {
  TrajectoryLoss out;
  const SupervisionMasks masks =
      apply_variant(rec.masks, cfg.variant, cfg.seed ^ fnv1a(rec.task_id));
  const double lambda_r = cfg.variant == Variant::NoSegmentation ? 1.0 : cfg.lambda_r;
  const double lambda_a = cfg.variant == Variant::NoSegmentation ? 0.0 : cfg.lambda_a;

  std::vector<int> rows;
  for (std::size_t t = 0; t < rec.token_ids.size(); ++t) {
    if (masks.m_r[t] || masks.m_a[t]) rows.push_back(static_cast<int>(t));
  }
  if (rows.empty()) return out;
  out.any = true;

  const ForwardCache cache = forward_rows(params, rec.token_ids, rows);
  std::optional<ForwardCache> teacher_cache;
  if (teacher != nullptr) teacher_cache = forward_rows(*teacher, rec.token_ids, rows);

  const int V = params.config.vocab_size;
  Eigen::MatrixXd dlogits(static_cast<Eigen::Index>(rows.size()), V);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t t = static_cast<std::size_t>(rows[r]);
    const int target = rec.token_ids[t];
    const Eigen::VectorXd student_row =
        cache.logits.row(static_cast<Eigen::Index>(r)).transpose();
    const double weight = masks.m_r[t] ? lambda_r : lambda_a;

    double value;
    Eigen::VectorXd p_ref;
    if (cfg.loss_mode == LossMode::KL) {
      const Eigen::VectorXd teacher_row =
          teacher_cache
              ? Eigen::VectorXd(teacher_cache->logits.row(static_cast<Eigen::Index>(r))
                                    .transpose())
              : smoothed_onehot_log_probs(V, target, cfg.teacher_eps);
      value = kl_per_token(teacher_row, student_row);
      p_ref = softmax_from_logits(teacher_row);
    } else {
      value = ce_per_token(student_row, target);
      p_ref = Eigen::VectorXd::Zero(V);
      p_ref(target) = 1.0;
    }
    if (masks.m_r[t]) {
      out.cot += value;
    } else {
      out.act += value;
    }
    dlogits.row(static_cast<Eigen::Index>(r)) =
        weight * (softmax_from_logits(student_row) - p_ref).transpose();
  }
  out.grads = backward_rows(params, rec.token_ids, cache, dlogits);
  return out;
}

}  // namespace

TrainerState run_training(const std::vector<PreprocessedTrajectory>& corpus,
                          const CurriculumPlan& plan, TrainerState state,
                          std::optional<int> stop_after_steps) {
  state.config.validate();
  if (corpus.empty()) throw SadError(ErrorKind::EmptyCorpus, "training corpus is empty");
  if (plan.epochs() != state.config.epochs) {
    throw SadError(ErrorKind::BadConfig, "pacing schedule length != configured epochs");
  }

  std::optional<ModelParams> teacher;
  if (!state.config.teacher_checkpoint.empty()) {
    teacher = load_params_json(state.config.teacher_checkpoint);
    if (teacher->config.vocab_size != state.config.model.vocab_size) {
      throw SadError(ErrorKind::BadConfig, "teacher vocab size differs from student");
    }
  }

  const auto start_time = std::chrono::steady_clock::now();
  const int batch = state.config.batch_size;
  const std::size_t n = corpus.size();

  for (; state.epoch <= state.config.epochs; ++state.epoch, state.epoch_pos = 0) {
    const std::vector<std::size_t> draws = plan.epoch_samples(state.epoch, n);
    while (state.epoch_pos < static_cast<int>(n)) {
      if (stop_after_steps && state.step >= *stop_after_steps) {
        state.log.wall_seconds +=
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time)
                .count();
        return state;
      }
      const std::size_t begin = static_cast<std::size_t>(state.epoch_pos);
      const std::size_t end = std::min(begin + static_cast<std::size_t>(batch), n);

      ParamGradients batch_grads = ParamGradients::zeros_like(state.params);
      double cot = 0.0, act = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        const TrajectoryLoss tl =
            trajectory_grad(state.params, teacher ? &*teacher : nullptr,
                            corpus[draws[i]], state.config);
        if (!tl.any) continue;
        batch_grads.accumulate(tl.grads);
        cot += tl.cot;
        act += tl.act;
      }
      const double scale = 1.0 / static_cast<double>(end - begin);
      batch_grads.scale(scale);
      cot *= scale;
      act *= scale;
      const double total =
          total_loss(cot, act,
                     state.config.variant == Variant::NoSegmentation ? 1.0
                                                                     : state.config.lambda_r,
                     state.config.variant == Variant::NoSegmentation ? 0.0
                                                                     : state.config.lambda_a);
      if (!std::isfinite(total)) {
        throw SadError(ErrorKind::NonFiniteLoss,
                       "step " + std::to_string(state.step) + " epoch " +
                           std::to_string(state.epoch) + ": loss " + std::to_string(total));
      }

      sgd_step(state.params, batch_grads, state.config.lr, state.config.clip);
      ++state.step;
      state.log.steps.push_back({state.step, cot, act, total});
      state.epoch_pos = static_cast<int>(end);
    }
  }
  state.log.wall_seconds +=
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  return state;
}

TrainResult train(const std::vector<PreprocessedTrajectory>& corpus,
                  const CurriculumPlan& plan, ModelParams params, const TrainConfig& config) {
  TrainerState state;
  state.params = std::move(params);
  state.config = config;
  state = run_training(corpus, plan, std::move(state));
  return {std::move(state.params), std::move(state.log)};
}

namespace {

nlohmann::json config_to_json(const TrainConfig& cfg) {
  return nlohmann::json{{"epochs", cfg.epochs},
                        {"lr", cfg.lr},
                        {"batch_size", cfg.batch_size},
                        {"lambda_r", cfg.lambda_r},
                        {"lambda_a", cfg.lambda_a},
                        {"loss_mode", std::string(to_string(cfg.loss_mode))},
                        {"variant", std::string(to_string(cfg.variant))},
                        {"clip", cfg.clip},
                        {"seed", cfg.seed},
                        {"teacher_eps", cfg.teacher_eps},
                        {"teacher_checkpoint", cfg.teacher_checkpoint},
                        {"model",
                         {{"vocab_size", cfg.model.vocab_size},
                          {"embed_dim", cfg.model.embed_dim},
                          {"context_window", cfg.model.context_window},
                          {"hidden_dim", cfg.model.hidden_dim},
                          {"seed", cfg.model.seed}}}};
}

TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  cfg.epochs = j.at("epochs").get<int>();
  cfg.lr = j.at("lr").get<double>();
  cfg.batch_size = j.at("batch_size").get<int>();
  cfg.lambda_r = j.at("lambda_r").get<double>();
  cfg.lambda_a = j.at("lambda_a").get<double>();
  cfg.loss_mode = loss_mode_from_string(j.at("loss_mode").get<std::string>());
  cfg.variant = variant_from_string(j.at("variant").get<std::string>());
  cfg.clip = j.at("clip").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.teacher_eps = j.at("teacher_eps").get<double>();
  cfg.teacher_checkpoint = j.at("teacher_checkpoint").get<std::string>();
  const auto& m = j.at("model");
  cfg.model.vocab_size = m.at("vocab_size").get<int>();
  cfg.model.embed_dim = m.at("embed_dim").get<int>();
  cfg.model.context_window = m.at("context_window").get<int>();
  cfg.model.hidden_dim = m.at("hidden_dim").get<int>();
  cfg.model.seed = m.at("seed").get<std::uint64_t>();
  return cfg;
}

}  // namespace

void save_checkpoint(const TrainerState& state, const std::string& path) {
  nlohmann::json steps = nlohmann::json::array();
  for (const StepLog& s : state.log.steps) {
    steps.push_back({{"step", s.step}, {"cot", s.cot}, {"act", s.act}, {"total", s.total}});
  }
  nlohmann::json j{{"version", kCheckpointVersion},
                   {"params", params_to_json(state.params)},
                   {"config", config_to_json(state.config)},
                   {"epoch", state.epoch},
                   {"epoch_pos", state.epoch_pos},
                   {"step", state.step},
                   {"log", {{"steps", steps}, {"wall_seconds", state.log.wall_seconds}}}};
  std::ofstream out(path);
  if (!out) throw SadError(ErrorKind::IoError, "cannot write " + path);
  out << j.dump() << '\n';
  if (!out) throw SadError(ErrorKind::IoError, "write failed: " + path);
}

TrainerState load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SadError(ErrorKind::IoError, "cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("version")) {
    throw SadError(ErrorKind::CorruptFile, "invalid checkpoint: " + path);
  }
  if (j.at("version").get<std::string>() != kCheckpointVersion) {
    throw SadError(ErrorKind::VersionMismatch,
                   "checkpoint version " + j.at("version").get<std::string>());
  }
  TrainerState state;
  try {
    state.params = params_from_json(j.at("params"));
    state.config = config_from_json(j.at("config"));
    state.epoch = j.at("epoch").get<int>();
    state.epoch_pos = j.at("epoch_pos").get<int>();
    state.step = j.at("step").get<int>();
    state.log.wall_seconds = j.at("log").at("wall_seconds").get<double>();
    for (const auto& s : j.at("log").at("steps")) {
      state.log.steps.push_back({s.at("step").get<int>(), s.at("cot").get<double>(),
                                 s.at("act").get<double>(), s.at("total").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw SadError(ErrorKind::CorruptFile, std::string("checkpoint field: ") + e.what());
  }
  return state;
}

}  // namespace sadkit
