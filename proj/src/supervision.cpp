#include "sadkit/supervision.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

namespace sadkit {

std::size_t SupervisionMasks::reason_count() const {
  return std::accumulate(m_r.begin(), m_r.end(), std::size_t{0});
}

std::size_t SupervisionMasks::action_count() const {
  return std::accumulate(m_a.begin(), m_a.end(), std::size_t{0});
}

SupervisionMasks build_masks(const TokenizedTrajectory& tok) {
  SupervisionMasks masks;
  masks.m_r.resize(tok.size(), 0);
  masks.m_a.resize(tok.size(), 0);
  for (std::size_t t = 0; t < tok.size(); ++t) {
    if (tok.labels[t] == TokenLabel::Reason) masks.m_r[t] = 1;
    if (tok.labels[t] == TokenLabel::Action) masks.m_a[t] = 1;
  }
  return masks;
}

ValidationReport validate_masks(const SupervisionMasks& masks, const TokenizedTrajectory& tok) {
  ValidationReport report;
  if (masks.m_r.size() != masks.m_a.size() || masks.m_r.size() != tok.size()) {
    report.add("LengthMismatch", "mask lengths disagree with token count");
    return report;
  }
  for (std::size_t t = 0; t < tok.size(); ++t) {
    if (masks.m_r[t] + masks.m_a[t] > 1) {
      report.add("Overlap", "token carries both masks", t);
    }
    const bool supervised = tok.labels[t] != TokenLabel::None;
    if (supervised && masks.m_r[t] == 0 && masks.m_a[t] == 0) {
      report.add("UncoveredToken", "supervised token has no mask bit", t);
    }
    if (!supervised && (masks.m_r[t] != 0 || masks.m_a[t] != 0)) {
      report.add("SpuriousMask", "unsupervised token carries a mask bit", t);
    }
    if (tok.labels[t] == TokenLabel::Reason && masks.m_r[t] != 1) {
      report.add("LabelMismatch", "reason token without m_r bit", t);
    }
    if (tok.labels[t] == TokenLabel::Action && masks.m_a[t] != 1) {
      report.add("LabelMismatch", "action token without m_a bit", t);
    }
  }
  return report;
}

std::vector<OverlayEntry> overlay_data(const TokenizedTrajectory& tok, const std::string& doc,
                                       const SupervisionMasks& masks) {
  std::vector<OverlayEntry> entries;
  entries.reserve(tok.size());
  for (std::size_t t = 0; t < tok.size(); ++t) {
    OverlayEntry e;
    e.token = doc.substr(tok.offsets[t].begin, tok.offsets[t].end - tok.offsets[t].begin);
    if (masks.m_r[t]) {
      e.color = OverlayColor::Reason;
    } else if (masks.m_a[t]) {
      e.color = OverlayColor::Action;
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

namespace {

void mean_var(const std::vector<std::size_t>& xs, double& mean, double& var) {
  if (xs.empty()) {
    mean = var = 0.0;
    return;
  }
  double sum = 0.0;
  for (auto x : xs) sum += static_cast<double>(x);
  mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (auto x : xs) sq += (static_cast<double>(x) - mean) * (static_cast<double>(x) - mean);
  var = sq / static_cast<double>(xs.size());
}

}  // namespace

SpanStats span_stats(const std::vector<SupervisionMasks>& corpus) {
  SpanStats stats;
  for (const SupervisionMasks& masks : corpus) {
    const std::size_t r = masks.reason_count();
    const std::size_t a = masks.action_count();
    stats.reason_counts.push_back(r);
    stats.action_counts.push_back(a);
    ++stats.reason_hist[r];
    ++stats.action_hist[a];
  }
  mean_var(stats.reason_counts, stats.reason_mean, stats.reason_var);
  mean_var(stats.action_counts, stats.action_mean, stats.action_var);
  return stats;
}

std::vector<PreprocessedTrajectory> load_masked_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SadError(ErrorKind::IoError, "cannot open " + path);
  std::vector<PreprocessedTrajectory> corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("task_id") ||
        !j.contains("token_ids") || !j.contains("m_r") || !j.contains("m_a")) {
      throw SadError(ErrorKind::MalformedRecord,
                     "line " + std::to_string(line_no) + ": invalid masked record");
    }
    PreprocessedTrajectory rec;
    try {
      rec.task_id = j.at("task_id").get<std::string>();
      rec.token_ids = j.at("token_ids").get<std::vector<int>>();
      rec.masks.m_r = j.at("m_r").get<std::vector<std::uint8_t>>();
      rec.masks.m_a = j.at("m_a").get<std::vector<std::uint8_t>>();
    } catch (const nlohmann::json::exception& e) {
      throw SadError(ErrorKind::MalformedRecord,
                     "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (rec.masks.m_r.size() != rec.token_ids.size() ||
        rec.masks.m_a.size() != rec.token_ids.size()) {
      throw SadError(ErrorKind::MalformedRecord,
                     "line " + std::to_string(line_no) + ": mask/token length mismatch");
    }
    corpus.push_back(std::move(rec));
  }
  return corpus;
}

void save_masked_jsonl(const std::vector<PreprocessedTrajectory>& corpus,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SadError(ErrorKind::IoError, "cannot write " + path);
  for (const PreprocessedTrajectory& rec : corpus) {
    nlohmann::json j{{"task_id", rec.task_id},
                     {"token_ids", rec.token_ids},
                     {"m_r", rec.masks.m_r},
                     {"m_a", rec.masks.m_a}};
    out << j.dump() << '\n';
  }
  if (!out) throw SadError(ErrorKind::IoError, "write failed: " + path);
}

}  // namespace sadkit
