#include "sadkit/segmenter.hpp"

#include <fstream>
#include <optional>
#include <regex>
#include <sstream>

#include <json.hpp>

namespace sadkit {

std::string_view to_string(SpanLabel label) {
  return label == SpanLabel::Reason ? "Reason" : "Action";
}

namespace {

struct LineMatch {
  std::size_t line_index;
  SpanLabel label;
  std::size_t payload_offset;  // offset of the payload within the line
};

std::optional<std::size_t> match_payload(const std::string& line, const std::regex& re) {
  std::smatch m;
  if (!std::regex_search(line, m, re) || m.size() < 2) return std::nullopt;
  return static_cast<std::size_t>(m.position(1));
}

}  // namespace

SegmentationRules SegmentationRules::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SadError(ErrorKind::IoError, "cannot open rules file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SadError(ErrorKind::MalformedRecord, "rules file " + path + ": " + e.what());
  }
  SegmentationRules rules;
  if (j.contains("reason_pattern")) rules.reason_pattern = j.at("reason_pattern").get<std::string>();
  if (j.contains("action_pattern")) rules.action_pattern = j.at("action_pattern").get<std::string>();
  if (j.contains("answer_pattern")) rules.answer_pattern = j.at("answer_pattern").get<std::string>();
  if (j.contains("mode")) {
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "prefix") {
      rules.mode = Mode::Prefix;
    } else if (mode == "two_phase") {
      rules.mode = Mode::TwoPhase;
    } else {
      throw SadError(ErrorKind::BadConfig, "unknown rules mode: " + mode);
    }
  }
  return rules;
}

SegmentedTrajectory segment(const RawTrajectory& raw, const SegmentationRules& rules,
                            MarkerPolicy policy) {
  if (raw.lines.empty()) {
    throw SadError(ErrorKind::NoSupervisedSpans, "trajectory " + raw.task_id + " has no lines");
  }
  for (std::size_t i = 0; i < raw.lines.size(); ++i) {
    if (raw.lines[i].find('\n') != std::string::npos) {
      throw SadError(ErrorKind::MalformedRecord,
                     "line " + std::to_string(i) + " contains a newline");
    }
  }

  SegmentedTrajectory seg;
  seg.source = raw;
  seg.marker_policy = policy;

  // Lines joined by single spaces; offsets recorded per line.
  std::vector<std::size_t> line_begin(raw.lines.size());
  for (std::size_t i = 0; i < raw.lines.size(); ++i) {
    if (i > 0) seg.document += ' ';
    line_begin[i] = seg.document.size();
    seg.document += raw.lines[i];
  }

  const std::regex reason_re(rules.reason_pattern);
  const std::regex action_re(rules.action_pattern);
  const std::regex answer_re(rules.answer_pattern);

  if (rules.mode == SegmentationRules::Mode::TwoPhase) {
    // Final Answer line is the action span; everything before it is one reason span.
    std::optional<LineMatch> answer;
    for (std::size_t i = 0; i < raw.lines.size(); ++i) {
      if (auto off = match_payload(raw.lines[i], answer_re)) {
        answer = LineMatch{i, SpanLabel::Action, *off};
      }
    }
    if (!answer) {
      throw SadError(ErrorKind::NoSupervisedSpans,
                     "trajectory " + raw.task_id + ": no Answer line for two-phase rules");
    }
    if (answer->line_index > 0) {
      Span reason;
      reason.label = SpanLabel::Reason;
      reason.begin = line_begin[0];
      reason.end = line_begin[answer->line_index - 1] + raw.lines[answer->line_index - 1].size();
      reason.text = seg.document.substr(reason.begin, reason.end - reason.begin);
      reason.payload = reason.text;
      for (std::size_t i = 0; i < answer->line_index; ++i) reason.line_indices.push_back(i);
      seg.spans.push_back(std::move(reason));
    }
    Span action;
    action.label = SpanLabel::Action;
    const std::size_t i = answer->line_index;
    action.begin = line_begin[i];
    if (policy == MarkerPolicy::MarkersUnsupervised) action.begin += answer->payload_offset;
    action.end = line_begin[i] + raw.lines[i].size();
    action.text = seg.document.substr(action.begin, action.end - action.begin);
    action.payload = raw.lines[i].substr(answer->payload_offset);
    action.line_indices.push_back(i);
    seg.spans.push_back(std::move(action));
    return seg;
  }

  std::vector<LineMatch> matches;
  for (std::size_t i = 0; i < raw.lines.size(); ++i) {
    const auto reason_off = match_payload(raw.lines[i], reason_re);
    auto action_off = match_payload(raw.lines[i], action_re);
    if (!action_off) action_off = match_payload(raw.lines[i], answer_re);
    if (reason_off && action_off) {
      throw SadError(ErrorKind::ConflictingMatch,
                     "line " + std::to_string(i) + " matches both Reason and Action patterns");
    }
    if (reason_off) matches.push_back({i, SpanLabel::Reason, *reason_off});
    if (action_off) matches.push_back({i, SpanLabel::Action, *action_off});
  }
  if (matches.empty()) {
    throw SadError(ErrorKind::NoSupervisedSpans,
                   "trajectory " + raw.task_id + ": no line matches any pattern");
  }

  // Adjacent same-label matched lines merge into one span; a new span starts
  // when the label alternates or an unmatched line breaks contiguity.
  for (std::size_t m = 0; m < matches.size(); ++m) {
    const LineMatch& lm = matches[m];
    const bool merge = !seg.spans.empty() && seg.spans.back().label == lm.label &&
                       !seg.spans.back().line_indices.empty() &&
                       seg.spans.back().line_indices.back() + 1 == lm.line_index;
    if (merge) {
      Span& span = seg.spans.back();
      span.end = line_begin[lm.line_index] + raw.lines[lm.line_index].size();
      span.text = seg.document.substr(span.begin, span.end - span.begin);
      span.payload += ' ';
      span.payload += raw.lines[lm.line_index].substr(lm.payload_offset);
      span.line_indices.push_back(lm.line_index);
    } else {
      Span span;
      span.label = lm.label;
      span.begin = line_begin[lm.line_index];
      if (policy == MarkerPolicy::MarkersUnsupervised) span.begin += lm.payload_offset;
      span.end = line_begin[lm.line_index] + raw.lines[lm.line_index].size();
      span.text = seg.document.substr(span.begin, span.end - span.begin);
      span.payload = raw.lines[lm.line_index].substr(lm.payload_offset);
      span.line_indices.push_back(lm.line_index);
      seg.spans.push_back(std::move(span));
    }
  }
  return seg;
}

std::string linearize(const SegmentedTrajectory& seg) {
  std::string out;
  for (const Span& span : seg.spans) {
    if (!out.empty()) out += ' ';
    out += span.label == SpanLabel::Reason ? kReasonMarker : kActMarker;
    out += ' ';
    out += span.payload;
  }
  return out;
}

SegmentedTrajectory parse_linearized(const std::string& text) {
  SegmentedTrajectory seg;
  seg.document = text;
  seg.source.task_id = "<linearized>";
  seg.source.lines = {text};
  seg.source.env_name = "<linearized>";

  struct Marker {
    std::size_t pos;
    std::size_t len;
    SpanLabel label;
  };
  std::vector<Marker> markers;
  const std::string reason_tok = std::string(kReasonMarker) + ' ';
  const std::string act_tok = std::string(kActMarker) + ' ';
  for (std::size_t i = 0; i < text.size();) {
    if (text.compare(i, reason_tok.size(), reason_tok) == 0) {
      markers.push_back({i, reason_tok.size(), SpanLabel::Reason});
      i += reason_tok.size();
    } else if (text.compare(i, act_tok.size(), act_tok) == 0) {
      markers.push_back({i, act_tok.size(), SpanLabel::Action});
      i += act_tok.size();
    } else {
      ++i;
    }
  }
  if (markers.empty()) {
    throw SadError(ErrorKind::NoSupervisedSpans, "no segment markers in linearized text");
  }
  for (std::size_t m = 0; m < markers.size(); ++m) {
    Span span;
    span.label = markers[m].label;
    span.begin = markers[m].pos + markers[m].len;
    span.end = m + 1 < markers.size() ? markers[m + 1].pos : text.size();
    while (span.end > span.begin && text[span.end - 1] == ' ') --span.end;
    span.text = text.substr(span.begin, span.end - span.begin);
    span.payload = span.text;
    span.line_indices = {0};
    seg.spans.push_back(std::move(span));
  }
  return seg;
}

ValidationReport round_trip_validate(const SegmentedTrajectory& seg) {
  ValidationReport report;
  for (std::size_t i = 0; i < seg.spans.size(); ++i) {
    const Span& span = seg.spans[i];
    if (span.begin >= span.end) {
      report.add("EmptySpan", "span has empty char_range", i);
    }
    if (span.end > seg.document.size()) {
      report.add("RangeOutOfBounds", "span char_range exceeds document", i);
      continue;
    }
    if (seg.document.substr(span.begin, span.end - span.begin) != span.text) {
      report.add("SliceMismatch", "span text differs from document slice", i);
    }
    if (i > 0) {
      if (span.begin < seg.spans[i - 1].begin) {
        report.add("OrderViolation", "spans not ordered by char_range", i);
      } else if (span.begin < seg.spans[i - 1].end) {
        report.add("Overlap", "span overlaps previous span", i);
      }
    }
  }
  if (!seg.spans.empty() && seg.spans.front().label == SpanLabel::Action) {
    report.add("ActionBeforeReason", "trajectory opens with an Action span", 0,
               Severity::Warning);
  }
  return report;
}

namespace {

RawTrajectory record_from_json(const nlohmann::json& j, std::size_t line_no) {
  const auto fail = [line_no](const std::string& what) -> SadError {
    return SadError(ErrorKind::MalformedRecord,
                    "line " + std::to_string(line_no) + ": " + what);
  };
  if (!j.is_object()) throw fail("record is not an object");
  for (const char* key : {"env", "task_id", "goal", "lines", "success"}) {
    if (!j.contains(key)) throw fail(std::string("missing field \"") + key + '"');
  }
  RawTrajectory raw;
  try {
    raw.env_name = j.at("env").get<std::string>();
    raw.task_id = j.at("task_id").get<std::string>();
    raw.goal = j.at("goal").get<std::string>();
    raw.lines = j.at("lines").get<std::vector<std::string>>();
    raw.final_success = j.at("success").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  }
  return raw;
}

}  // namespace

std::vector<RawTrajectory> load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SadError(ErrorKind::IoError, "cannot open " + path);
  std::vector<RawTrajectory> corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw SadError(ErrorKind::MalformedRecord,
                     "line " + std::to_string(line_no) + ": invalid JSON");
    }
    corpus.push_back(record_from_json(j, line_no));
  }
  return corpus;
}

void save_jsonl(const std::vector<RawTrajectory>& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SadError(ErrorKind::IoError, "cannot write " + path);
  for (const RawTrajectory& raw : corpus) {
    nlohmann::json j{{"env", raw.env_name},
                     {"task_id", raw.task_id},
                     {"goal", raw.goal},
                     {"lines", raw.lines},
                     {"success", raw.final_success}};
    out << j.dump() << '\n';
  }
  if (!out) throw SadError(ErrorKind::IoError, "write failed: " + path);
}

}  // namespace sadkit
