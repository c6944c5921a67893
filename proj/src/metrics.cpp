#include "sadkit/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

namespace sadkit {

double task_success_rate(const std::vector<bool>& successes) {
  if (successes.empty()) throw SadError(ErrorKind::EmptySet, "task_success_rate of no episodes");
  std::size_t wins = 0;
  for (bool s : successes) {
    if (s) ++wins;
  }
  return 100.0 * static_cast<double>(wins) / static_cast<double>(successes.size());
}

namespace {

double mean(const std::vector<double>& xs, const char* what) {
  if (xs.empty()) throw SadError(ErrorKind::EmptySet, std::string(what) + " of no episodes");
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

}  // namespace

double avg_reasoning_length(const std::vector<double>& reason_token_counts) {
  return mean(reason_token_counts, "avg_reasoning_length");
}

double avg_steps(const std::vector<double>& step_counts) {
  return mean(step_counts, "avg_steps");
}

double cot_match_rate(const std::vector<std::vector<int>>& student_tokens,
                      const std::vector<std::vector<int>>& teacher_tokens,
                      CotMatchMode mode) {
  if (teacher_tokens.empty() || student_tokens.size() != teacher_tokens.size()) {
    throw SadError(ErrorKind::EmptySet, "cot_match_rate episode lists empty or mismatched");
  }
  double sum = 0.0;
  for (std::size_t e = 0; e < teacher_tokens.size(); ++e) {
    const auto& teacher = teacher_tokens[e];
    const auto& student = student_tokens[e];
    if (teacher.empty()) {
      throw SadError(ErrorKind::EmptyTeacherSpan,
                     "episode " + std::to_string(e) + " has an empty teacher span");
    }
    std::size_t overlap = 0;
    switch (mode) {
      case CotMatchMode::Multiset: {
        std::map<int, std::size_t> counts;
        for (int id : student) ++counts[id];
        for (int id : teacher) {
          auto it = counts.find(id);
          if (it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
          }
        }
        break;
      }
      case CotMatchMode::Set: {
        std::map<int, bool> seen;
        for (int id : student) seen[id] = true;
        std::map<int, bool> counted;
        for (int id : teacher) {
          if (seen.count(id) && !counted[id]) {
            counted[id] = true;
            ++overlap;
          }
        }
        break;
      }
      case CotMatchMode::Positional: {
        const std::size_t upto = std::min(student.size(), teacher.size());
        for (std::size_t i = 0; i < upto; ++i) {
          if (student[i] == teacher[i]) ++overlap;
        }
        break;
      }
    }
    sum += static_cast<double>(overlap) / static_cast<double>(teacher.size());
  }
  return 100.0 * sum / static_cast<double>(teacher_tokens.size());
}

MetricsBundle compute_metrics(const std::vector<RolloutResult>& episodes, CotMatchMode mode) {
  if (episodes.empty()) throw SadError(ErrorKind::EmptySet, "compute_metrics of no episodes");
  std::vector<bool> successes;
  std::vector<double> reason_lengths, steps;
  std::vector<std::vector<int>> student, teacher;
  for (const RolloutResult& e : episodes) {
    successes.push_back(e.success);
    reason_lengths.push_back(static_cast<double>(e.student_reason_tokens.size()));
    steps.push_back(static_cast<double>(e.steps));
    student.push_back(e.student_reason_tokens);
    teacher.push_back(e.teacher_reason_tokens);
  }
  MetricsBundle bundle;
  bundle.tsr = task_success_rate(successes);
  bundle.arl = avg_reasoning_length(reason_lengths);
  bundle.cot_match = cot_match_rate(student, teacher, mode);
  bundle.avg_steps = avg_steps(steps);
  bundle.n = static_cast<int>(episodes.size());
  return bundle;
}

std::string MetricsBundle::to_json_string(const std::string& variant,
                                          std::uint64_t seed) const {
  nlohmann::json j{{"tsr", tsr},           {"arl", arl},   {"cot_match", cot_match},
                   {"avg_steps", avg_steps}, {"n", n},     {"variant", variant},
                   {"seed", seed}};
  return j.dump();
}

void MetricsBundle::save_json(const std::string& path, const std::string& variant,
                              std::uint64_t seed) const {
  std::ofstream out(path);
  if (!out) throw SadError(ErrorKind::IoError, "cannot write " + path);
  out << to_json_string(variant, seed) << '\n';
}

}  // namespace sadkit
