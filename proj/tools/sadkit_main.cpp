// sadkit: corpus generation, preprocessing, distillation training, evaluation,
// mask auditing and ablation sweeps for span-supervised agent trajectories.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "sadkit/curriculum.hpp"
#include "sadkit/envkit.hpp"
#include "sadkit/metrics.hpp"
#include "sadkit/pipeline.hpp"
#include "sadkit/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sadkit;

namespace {

constexpr const char* kToolVersion = "sadkit 0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

int exit_code_for(const SadError& e) {
  switch (e.kind()) {
    case ErrorKind::IoError:
    case ErrorKind::CorruptFile:
      return kExitIo;
    default:
      return kExitValidation;
  }
}

struct TrainFlags {
  std::string config_path;
  std::string corpus_path;
  std::string out_dir = "run";
  std::string variant = "full";
  std::string loss_mode = "kl";
  std::string difficulty;
  std::uint64_t seed = 0;
  double lambda_r = 1.0, lambda_a = 1.0;
  double alpha = 1.0, beta = 1.0, gamma = 1.0;
  int epochs = 0;  // 0: keep the config/default value
  double lr = 0.0;
  int eval_n = 100;
};

TrainConfig config_from_json(const json& j, TrainConfig base) {
  if (j.contains("epochs")) base.epochs = j.at("epochs").get<int>();
  if (j.contains("lr")) base.lr = j.at("lr").get<double>();
  if (j.contains("batch_size")) base.batch_size = j.at("batch_size").get<int>();
  if (j.contains("lambda_r")) base.lambda_r = j.at("lambda_r").get<double>();
  if (j.contains("lambda_a")) base.lambda_a = j.at("lambda_a").get<double>();
  if (j.contains("loss_mode")) {
    base.loss_mode = loss_mode_from_string(j.at("loss_mode").get<std::string>());
  }
  if (j.contains("variant")) {
    base.variant = variant_from_string(j.at("variant").get<std::string>());
  }
  if (j.contains("clip")) base.clip = j.at("clip").get<double>();
  if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("teacher_eps")) base.teacher_eps = j.at("teacher_eps").get<double>();
  if (j.contains("teacher_checkpoint")) {
    base.teacher_checkpoint = j.at("teacher_checkpoint").get<std::string>();
  }
  if (j.contains("model")) {
    const json& m = j.at("model");
    if (m.contains("embed_dim")) base.model.embed_dim = m.at("embed_dim").get<int>();
    if (m.contains("context_window")) {
      base.model.context_window = m.at("context_window").get<int>();
    }
    if (m.contains("hidden_dim")) base.model.hidden_dim = m.at("hidden_dim").get<int>();
  }
  return base;
}

json config_to_json(const TrainConfig& cfg) {
  return json{{"epochs", cfg.epochs},
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

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SadError(ErrorKind::IoError, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SadError(ErrorKind::CorruptFile, path + ": " + e.what());
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw SadError(ErrorKind::IoError, "cannot write " + path);
  out << content;
}

DifficultyMix mix_or_default(const std::string& text) {
  return text.empty() ? default_difficulty_mix() : parse_difficulty_mix(text);
}

// ---------------------------------------------------------------------------
// train plumbing shared by cmd_train and cmd_experiment

struct TrainArtifacts {
  ModelParams params;
  Vocab vocab;
  TrainLog log;
  MetricsBundle metrics;
};

TrainArtifacts run_one_training(const std::vector<RawTrajectory>& corpus, TrainConfig cfg,
                                double alpha, double beta, double gamma, int eval_n,
                                const DifficultyMix& mix) {
  PreprocessOutput pre = preprocess_corpus(corpus, SegmentationRules{});
  if (!pre.report.ok()) {
    throw SadError(ErrorKind::MalformedRecord,
                   "corpus failed mask validation: " + pre.report.findings.front().message);
  }
  cfg.model.vocab_size = static_cast<int>(pre.vocab.size());
  cfg.model.seed = cfg.seed;
  cfg.validate();

  const auto scored =
      score_corpus(pre.records, cfg.model.vocab_size, cfg.teacher_eps, alpha, beta, gamma);
  const CurriculumPlan plan =
      build_plan(scored, linear_pacing(cfg.epochs), cfg.seed, alpha, beta, gamma);

  TrainArtifacts art;
  TrainResult result = train(pre.records, plan, init_params(cfg.model), cfg);
  art.params = std::move(result.params);
  art.log = std::move(result.log);
  art.vocab = std::move(pre.vocab);
  art.metrics =
      compute_metrics(evaluate_policy(art.params, art.vocab, eval_n, cfg.seed, mix));
  return art;
}

json manifest_json(const TrainConfig& cfg, const std::string& corpus_path,
                   const std::vector<std::string>& artifacts) {
  return json{{"tool_version", kToolVersion},
              {"config", config_to_json(cfg)},
              {"corpus_path", corpus_path},
              {"corpus_hash", file_hash_hex(corpus_path)},
              {"seed", cfg.seed},
              {"artifacts", artifacts}};
}

// ---------------------------------------------------------------------------
// audit rendering

const char* kAnsiReason = "\033[34m";  // blue
const char* kAnsiAction = "\033[31m";  // red
const char* kAnsiGray = "\033[90m";
const char* kAnsiReset = "\033[0m";

std::string ansi_overlay(const std::vector<OverlayEntry>& entries) {
  std::string out;
  for (const OverlayEntry& e : entries) {
    const char* color = e.color == OverlayColor::Reason   ? kAnsiReason
                        : e.color == OverlayColor::Action ? kAnsiAction
                                                          : kAnsiGray;
    if (!out.empty()) out += ' ';
    out += color;
    out += e.token;
    out += kAnsiReset;
  }
  return out;
}

std::string html_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string html_overlay(const std::vector<std::vector<OverlayEntry>>& trajectories,
                         const std::vector<std::string>& task_ids) {
  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">\n"
      << "<title>supervision mask overlay</title>\n<style>\n"
      << "body { font-family: monospace; background: #fff; }\n"
      << ".reason { color: #1f4fd8; }\n"
      << ".action { color: #c62828; }\n"
      << ".unsupervised { color: #9e9e9e; }\n"
      << ".traj { margin-bottom: 1.5em; }\n"
      << "</style></head><body>\n<h1>supervision mask overlay</h1>\n";
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    out << "<div class=\"traj\"><h2>" << html_escape(task_ids[i]) << "</h2><p>";
    bool first = true;
    for (const OverlayEntry& e : trajectories[i]) {
      const char* cls = e.color == OverlayColor::Reason   ? "reason"
                        : e.color == OverlayColor::Action ? "action"
                                                          : "unsupervised";
      if (!first) out << ' ';
      first = false;
      out << "<span class=\"" << cls << "\">" << html_escape(e.token) << "</span>";
    }
    out << "</p></div>\n";
  }
  out << "</body></html>\n";
  return out.str();
}

json span_stats_json(const SpanStats& stats) {
  json reason_hist = json::object();
  for (const auto& [len, count] : stats.reason_hist) {
    reason_hist[std::to_string(len)] = count;
  }
  json action_hist = json::object();
  for (const auto& [len, count] : stats.action_hist) {
    action_hist[std::to_string(len)] = count;
  }
  std::size_t reason_tokens = 0, action_tokens = 0;
  for (std::size_t c : stats.reason_counts) reason_tokens += c;
  for (std::size_t c : stats.action_counts) action_tokens += c;
  json j = json::object();
  j["n_trajectories"] = stats.reason_counts.size();
  j["reason_tokens"] = reason_tokens;
  j["action_tokens"] = action_tokens;
  j["reason_mean"] = stats.reason_mean;
  j["action_mean"] = stats.action_mean;
  j["reason_var"] = stats.reason_var;
  j["action_var"] = stats.action_var;
  j["reason_hist"] = reason_hist;
  j["action_hist"] = action_hist;
  return j;
}

// ---------------------------------------------------------------------------
// commands

int cmd_generate(int n, std::uint64_t seed, const std::string& difficulty,
                 const std::string& out) {
  const auto corpus = generate_corpus(n, seed, mix_or_default(difficulty));
  save_jsonl(corpus, out);
  std::printf("wrote %d trajectories to %s\n", n, out.c_str());
  return kExitOk;
}

int cmd_preprocess(const std::string& in, const std::string& rules_path,
                   const std::string& vocab_out, const std::string& out) {
  SegmentationRules rules;
  if (!rules_path.empty()) rules = SegmentationRules::load_json(rules_path);
  const auto corpus = load_jsonl(in);
  const PreprocessOutput pre = preprocess_corpus(corpus, rules);
  if (!pre.report.ok()) {
    for (const Finding& f : pre.report.findings) {
      std::fprintf(stderr, "%s: %s\n", f.kind.c_str(), f.message.c_str());
    }
    return kExitValidation;
  }
  for (const Finding& f : pre.report.findings) {
    std::fprintf(stderr, "warning: %s: %s\n", f.kind.c_str(), f.message.c_str());
  }
  if (!vocab_out.empty()) pre.vocab.save(vocab_out);
  save_masked_jsonl(pre.records, out);
  std::printf("preprocessed %zu trajectories (vocab %zu) to %s\n", pre.records.size(),
              pre.vocab.size(), out.c_str());
  return kExitOk;
}

int cmd_train(const TrainFlags& flags, const CLI::App& sub) {
  TrainConfig cfg;
  if (!flags.config_path.empty()) {
    cfg = config_from_json(load_json_file(flags.config_path), cfg);
  }
  // Explicit flags override the config file.
  if (sub.count("--seed") != 0) cfg.seed = flags.seed;
  if (sub.count("--variant") != 0) cfg.variant = variant_from_string(flags.variant);
  if (sub.count("--loss-mode") != 0) cfg.loss_mode = loss_mode_from_string(flags.loss_mode);
  if (sub.count("--lambda-r") != 0) cfg.lambda_r = flags.lambda_r;
  if (sub.count("--lambda-a") != 0) cfg.lambda_a = flags.lambda_a;
  if (flags.epochs > 0) cfg.epochs = flags.epochs;
  if (flags.lr > 0.0) cfg.lr = flags.lr;

  const DifficultyMix mix = mix_or_default(flags.difficulty);
  const auto corpus = load_jsonl(flags.corpus_path);
  const TrainArtifacts art = run_one_training(corpus, cfg, flags.alpha, flags.beta,
                                              flags.gamma, flags.eval_n, mix);
  cfg.model.vocab_size = static_cast<int>(art.vocab.size());
  cfg.model.seed = cfg.seed;

  fs::create_directories(flags.out_dir);
  const std::string ckpt = flags.out_dir + "/checkpoint.json";
  const std::string log_csv = flags.out_dir + "/train_log.csv";
  const std::string metrics_path = flags.out_dir + "/metrics.json";
  const std::string vocab_path = flags.out_dir + "/vocab.json";
  save_params_json(art.params, ckpt);
  art.log.save_csv(log_csv);
  art.metrics.save_json(metrics_path, std::string(to_string(cfg.variant)), cfg.seed);
  art.vocab.save(vocab_path);
  write_text_file(
      flags.out_dir + "/manifest.json",
      manifest_json(cfg, flags.corpus_path, {ckpt, log_csv, metrics_path, vocab_path})
              .dump(2) +
          "\n");
  std::printf("trained %s (seed %llu): tsr=%.1f arl=%.1f cot_match=%.1f avg_steps=%.2f\n",
              std::string(to_string(cfg.variant)).c_str(),
              static_cast<unsigned long long>(cfg.seed), art.metrics.tsr, art.metrics.arl,
              art.metrics.cot_match, art.metrics.avg_steps);
  return kExitOk;
}

int cmd_eval(const std::string& ckpt, const std::string& vocab_path, int n,
             std::uint64_t seed, const std::string& difficulty, const std::string& out) {
  const ModelParams params = load_params_json(ckpt);
  const Vocab vocab = Vocab::load(vocab_path);
  if (static_cast<int>(vocab.size()) != params.config.vocab_size) {
    throw SadError(ErrorKind::ShapeMismatch, "vocab size does not match checkpoint");
  }
  const MetricsBundle metrics =
      compute_metrics(evaluate_policy(params, vocab, n, seed, mix_or_default(difficulty)));
  metrics.save_json(out, "", seed);
  std::printf("%s\n", metrics.to_json_string("", seed).c_str());
  return kExitOk;
}

int cmd_audit(const std::string& corpus_path, const std::string& out_dir, int n_overlay) {
  const auto corpus = load_jsonl(corpus_path);
  const PreprocessOutput pre = preprocess_corpus(corpus, SegmentationRules{});

  std::vector<SupervisionMasks> masks;
  masks.reserve(pre.records.size());
  for (const auto& rec : pre.records) masks.push_back(rec.masks);
  const SpanStats stats = span_stats(masks);

  std::printf("trajectories: %zu\n", pre.records.size());
  std::printf("validation findings: %zu (%s)\n", pre.report.findings.size(),
              pre.report.ok() ? "ok" : "FAILED");
  for (const Finding& f : pre.report.findings) {
    std::printf("  %s: %s\n", f.kind.c_str(), f.message.c_str());
  }
  std::size_t reason_tokens = 0, action_tokens = 0;
  for (std::size_t c : stats.reason_counts) reason_tokens += c;
  for (std::size_t c : stats.action_counts) action_tokens += c;
  std::printf("reason tokens: %zu (mean %.2f/traj), action tokens: %zu (mean %.2f/traj)\n",
              reason_tokens, stats.reason_mean, action_tokens, stats.action_mean);

  std::vector<std::vector<OverlayEntry>> overlays;
  std::vector<std::string> ids;
  const std::size_t n_show =
      std::min<std::size_t>(static_cast<std::size_t>(n_overlay), pre.records.size());
  for (std::size_t i = 0; i < n_show; ++i) {
    overlays.push_back(
        overlay_data(pre.tokenized[i], pre.segmented[i].document, pre.records[i].masks));
    ids.push_back(pre.records[i].task_id);
  }
  for (std::size_t i = 0; i < overlays.size(); ++i) {
    std::printf("\n%s\n%s\n", ids[i].c_str(), ansi_overlay(overlays[i]).c_str());
  }

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_text_file(out_dir + "/span_stats.json", span_stats_json(stats).dump(2) + "\n");
    write_text_file(out_dir + "/overlay.html", html_overlay(overlays, ids));
    std::printf("\nwrote %s/span_stats.json and %s/overlay.html\n", out_dir.c_str(),
                out_dir.c_str());
  }
  return pre.report.ok() ? kExitOk : kExitValidation;
}

int cmd_experiment(const TrainFlags& flags, int n_seeds) {
  const auto corpus = load_jsonl(flags.corpus_path);
  const DifficultyMix mix = mix_or_default(flags.difficulty);
  TrainConfig base;
  if (!flags.config_path.empty()) {
    base = config_from_json(load_json_file(flags.config_path), base);
  }
  if (flags.epochs > 0) base.epochs = flags.epochs;
  if (flags.lr > 0.0) base.lr = flags.lr;

  const Variant variants[] = {Variant::Full, Variant::ReasonOnly, Variant::ActOnly,
                              Variant::NoSegmentation, Variant::RandomMask};
  fs::create_directories(flags.out_dir);
  std::ofstream csv(flags.out_dir + "/experiment.csv");
  if (!csv) throw SadError(ErrorKind::IoError, "cannot write experiment.csv");
  csv << "variant,seed,tsr,arl,cot_match,avg_steps\n";

  struct Row {
    std::string variant;
    double tsr = 0, arl = 0, cot = 0, steps = 0;
  };
  std::vector<Row> rows;
  for (const Variant variant : variants) {
    Row row;
    row.variant = std::string(to_string(variant));
    for (int s = 0; s < n_seeds; ++s) {
      TrainConfig cfg = base;
      cfg.variant = variant;
      cfg.seed = flags.seed + static_cast<std::uint64_t>(s);
      const TrainArtifacts art = run_one_training(corpus, cfg, flags.alpha, flags.beta,
                                                  flags.gamma, flags.eval_n, mix);
      csv << row.variant << ',' << cfg.seed << ',' << art.metrics.tsr << ','
          << art.metrics.arl << ',' << art.metrics.cot_match << ','
          << art.metrics.avg_steps << '\n';
      row.tsr += art.metrics.tsr;
      row.arl += art.metrics.arl;
      row.cot += art.metrics.cot_match;
      row.steps += art.metrics.avg_steps;
      std::printf("%-16s seed %llu: tsr=%.1f\n", row.variant.c_str(),
                  static_cast<unsigned long long>(cfg.seed), art.metrics.tsr);
    }
    row.tsr /= n_seeds;
    row.arl /= n_seeds;
    row.cot /= n_seeds;
    row.steps /= n_seeds;
    rows.push_back(row);
  }

  std::ostringstream table;
  table << "variant            tsr      arl   cot_match  avg_steps  (mean over "
        << n_seeds << " seeds)\n";
  for (const Row& row : rows) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-16s %6.1f %8.1f %10.1f %10.2f\n",
                  row.variant.c_str(), row.tsr, row.arl, row.cot, row.steps);
    table << line;
  }
  write_text_file(flags.out_dir + "/experiment.txt", table.str());
  std::printf("\n%s", table.str().c_str());
  std::printf("wrote %s/experiment.csv and %s/experiment.txt\n", flags.out_dir.c_str(),
              flags.out_dir.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"span-supervised agent distillation toolkit"};
  app.require_subcommand(1);

  // generate
  int gen_n = 1000;
  std::uint64_t gen_seed = 0;
  std::string gen_difficulty, gen_out = "corpus.jsonl";
  CLI::App* generate = app.add_subcommand("generate", "generate a teacher trajectory corpus");
  generate->add_option("--n", gen_n, "number of episodes");
  generate->add_option("--seed", gen_seed, "corpus RNG seed");
  generate->add_option("--difficulty", gen_difficulty, "difficulty mix, e.g. 1:0.2,2:0.5,3:0.3");
  generate->add_option("--out", gen_out, "output trajectory JSONL");

  // preprocess
  std::string pre_in, pre_rules, pre_vocab, pre_out = "masked.jsonl";
  CLI::App* preprocess =
      app.add_subcommand("preprocess", "segment, tokenize and build supervision masks");
  preprocess->add_option("--in", pre_in, "input trajectory JSONL")->required();
  preprocess->add_option("--rules", pre_rules, "segmentation rules JSON");
  preprocess->add_option("--vocab-out", pre_vocab, "write the vocabulary JSON here");
  preprocess->add_option("--out", pre_out, "output masked JSONL");

  // train
  TrainFlags train_flags;
  CLI::App* train_cmd = app.add_subcommand("train", "train a student by masked distillation");
  train_cmd->add_option("--corpus", train_flags.corpus_path, "trajectory JSONL")->required();
  train_cmd->add_option("--config", train_flags.config_path, "training config JSON");
  train_cmd->add_option("--out", train_flags.out_dir, "output directory");
  train_cmd->add_option("--seed", train_flags.seed, "training seed");
  train_cmd->add_option("--variant", train_flags.variant,
                        "full|reason_only|act_only|no_segmentation|random_mask");
  train_cmd->add_option("--loss-mode", train_flags.loss_mode, "kl|ce");
  train_cmd->add_option("--lambda-r", train_flags.lambda_r, "reasoning loss weight");
  train_cmd->add_option("--lambda-a", train_flags.lambda_a, "action loss weight");
  train_cmd->add_option("--alpha", train_flags.alpha, "curriculum reason-length weight");
  train_cmd->add_option("--beta", train_flags.beta, "curriculum action-length weight");
  train_cmd->add_option("--gamma", train_flags.gamma, "curriculum entropy weight");
  train_cmd->add_option("--epochs", train_flags.epochs, "epoch count");
  train_cmd->add_option("--lr", train_flags.lr, "learning rate");
  train_cmd->add_option("--difficulty", train_flags.difficulty, "eval difficulty mix");
  train_cmd->add_option("--eval-n", train_flags.eval_n, "episodes for the final evaluation");

  // eval
  std::string eval_ckpt, eval_vocab, eval_difficulty, eval_out = "metrics.json";
  int eval_n = 100;
  std::uint64_t eval_seed = 0;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint with live rollouts");
  eval_cmd->add_option("--ckpt", eval_ckpt, "model checkpoint JSON")->required();
  eval_cmd->add_option("--vocab", eval_vocab, "vocabulary JSON")->required();
  eval_cmd->add_option("--n", eval_n, "episode count");
  eval_cmd->add_option("--seed", eval_seed, "evaluation seed");
  eval_cmd->add_option("--difficulty", eval_difficulty, "difficulty mix");
  eval_cmd->add_option("--out", eval_out, "metrics JSON output");

  // audit
  std::string audit_corpus, audit_out;
  int audit_overlay_n = 3;
  CLI::App* audit =
      app.add_subcommand("audit", "validate masks, print span stats and render overlays");
  audit->add_option("--corpus", audit_corpus, "trajectory JSONL")->required();
  audit->add_option("--out", audit_out, "directory for span_stats.json and overlay.html");
  audit->add_option("--overlay-n", audit_overlay_n, "trajectories to render");

  // experiment
  TrainFlags exp_flags;
  exp_flags.out_dir = "experiment";
  int exp_seeds = 5;
  CLI::App* experiment =
      app.add_subcommand("experiment", "variant x seed ablation sweep with a summary table");
  experiment->add_option("--corpus", exp_flags.corpus_path, "trajectory JSONL")->required();
  experiment->add_option("--config", exp_flags.config_path, "training config JSON");
  experiment->add_option("--out", exp_flags.out_dir, "output directory");
  experiment->add_option("--seed", exp_flags.seed, "first seed");
  experiment->add_option("--seeds", exp_seeds, "seeds per variant");
  experiment->add_option("--alpha", exp_flags.alpha, "curriculum reason-length weight");
  experiment->add_option("--beta", exp_flags.beta, "curriculum action-length weight");
  experiment->add_option("--gamma", exp_flags.gamma, "curriculum entropy weight");
  experiment->add_option("--epochs", exp_flags.epochs, "epoch count");
  experiment->add_option("--lr", exp_flags.lr, "learning rate");
  experiment->add_option("--difficulty", exp_flags.difficulty, "eval difficulty mix");
  experiment->add_option("--eval-n", exp_flags.eval_n, "episodes per evaluation");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(gen_n, gen_seed, gen_difficulty, gen_out);
    if (preprocess->parsed()) return cmd_preprocess(pre_in, pre_rules, pre_vocab, pre_out);
    if (train_cmd->parsed()) return cmd_train(train_flags, *train_cmd);
    if (eval_cmd->parsed()) {
      return cmd_eval(eval_ckpt, eval_vocab, eval_n, eval_seed, eval_difficulty, eval_out);
    }
    if (audit->parsed()) return cmd_audit(audit_corpus, audit_out, audit_overlay_n);
    if (experiment->parsed()) return cmd_experiment(exp_flags, exp_seeds);
  } catch (const SadError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return kExitOk;
}
