#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sadkit/common.hpp"

namespace sadkit {

struct RawTrajectory {
  std::string env_name;
  std::string task_id;
  std::string goal;
  std::vector<std::string> lines;  // newline-free
  bool final_success = false;

  bool operator==(const RawTrajectory&) const = default;
};

enum class SpanLabel { Reason, Action };

std::string_view to_string(SpanLabel label);

struct Span {
  SpanLabel label = SpanLabel::Reason;
  std::string text;     // document slice at [begin, end)
  std::string payload;  // text with the "Reasoning:" / "Action:" line prefixes stripped
  std::size_t begin = 0;
  std::size_t end = 0;  // half-open
  std::vector<std::size_t> line_indices;
};

// Whether the "Reasoning:" / "Action:" prefix tokens sit inside the span
// (and thus receive its supervision mask) or stay unsupervised.
enum class MarkerPolicy { MarkersInSpan, MarkersUnsupervised };

struct SegmentedTrajectory {
  RawTrajectory source;
  std::string document;  // all lines joined by single spaces
  std::vector<Span> spans;
  MarkerPolicy marker_policy = MarkerPolicy::MarkersInSpan;
};

struct SegmentationRules {
  // Line-anchored ECMAScript regexes; group 1 captures the payload.
  std::string reason_pattern = R"(^Reasoning:\s*(.+))";
  std::string action_pattern = R"(^Action:\s*(.+))";
  std::string answer_pattern = R"(^Answer:\s*(.+))";

  // Prefix: per-line prefix matching, alternating spans.
  // TwoPhase: everything before the final Answer line is one Reason span,
  // the Answer line itself is the Action span.
  enum class Mode { Prefix, TwoPhase };
  Mode mode = Mode::Prefix;

  static SegmentationRules load_json(const std::string& path);
};

inline const char* kReasonMarker = "[REASON]";
inline const char* kActMarker = "[ACT]";

SegmentedTrajectory segment(const RawTrajectory& raw, const SegmentationRules& rules,
                            MarkerPolicy policy = MarkerPolicy::MarkersInSpan);

// Flattened marked form: "[REASON] <payload> [ACT] <payload> ...".
std::string linearize(const SegmentedTrajectory& seg);

// Inverse of linearize on its own output (spans carry payloads only).
SegmentedTrajectory parse_linearized(const std::string& text);

ValidationReport round_trip_validate(const SegmentedTrajectory& seg);

std::vector<RawTrajectory> load_jsonl(const std::string& path);
void save_jsonl(const std::vector<RawTrajectory>& corpus, const std::string& path);

}  // namespace sadkit
