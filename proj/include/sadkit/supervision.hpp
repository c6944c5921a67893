#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sadkit/common.hpp"
#include "sadkit/tokenizer.hpp"

namespace sadkit {

struct SupervisionMasks {
  std::vector<std::uint8_t> m_r;
  std::vector<std::uint8_t> m_a;

  std::size_t size() const { return m_r.size(); }
  std::size_t reason_count() const;
  std::size_t action_count() const;

  bool operator==(const SupervisionMasks&) const = default;
};

SupervisionMasks build_masks(const TokenizedTrajectory& tok);

ValidationReport validate_masks(const SupervisionMasks& masks, const TokenizedTrajectory& tok);

enum class OverlayColor { Reason, Action, None };

struct OverlayEntry {
  std::string token;
  OverlayColor color = OverlayColor::None;
};

std::vector<OverlayEntry> overlay_data(const TokenizedTrajectory& tok, const std::string& doc,
                                       const SupervisionMasks& masks);

struct SpanStats {
  std::vector<std::size_t> reason_counts;  // per trajectory
  std::vector<std::size_t> action_counts;
  std::map<std::size_t, std::size_t> reason_hist;
  std::map<std::size_t, std::size_t> action_hist;
  double reason_mean = 0.0, reason_var = 0.0;
  double action_mean = 0.0, action_var = 0.0;
};

SpanStats span_stats(const std::vector<SupervisionMasks>& corpus);

// Preprocessed training record: token ids plus the two masks.
struct PreprocessedTrajectory {
  std::string task_id;
  std::vector<int> token_ids;
  SupervisionMasks masks;

  bool operator==(const PreprocessedTrajectory&) const = default;
};

std::vector<PreprocessedTrajectory> load_masked_jsonl(const std::string& path);
void save_masked_jsonl(const std::vector<PreprocessedTrajectory>& corpus, const std::string& path);

}  // namespace sadkit
