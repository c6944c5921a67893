#pragma once

#include <string>
#include <vector>

#include "sadkit/common.hpp"
#include "sadkit/envkit.hpp"

namespace sadkit {

struct MetricsBundle {
  double tsr = 0.0;        // percent
  double arl = 0.0;        // tokens
  double cot_match = 0.0;  // percent
  double avg_steps = 0.0;
  int n = 0;

  void save_json(const std::string& path, const std::string& variant = "",
                 std::uint64_t seed = 0) const;
  std::string to_json_string(const std::string& variant = "", std::uint64_t seed = 0) const;
};

double task_success_rate(const std::vector<bool>& successes);
double avg_reasoning_length(const std::vector<double>& reason_token_counts);
double avg_steps(const std::vector<double>& step_counts);

enum class CotMatchMode { Multiset, Set, Positional };

// Per-episode |overlap| / |teacher span|, averaged, as a percentage.
double cot_match_rate(const std::vector<std::vector<int>>& student_tokens,
                      const std::vector<std::vector<int>>& teacher_tokens,
                      CotMatchMode mode = CotMatchMode::Multiset);

MetricsBundle compute_metrics(const std::vector<RolloutResult>& episodes,
                              CotMatchMode mode = CotMatchMode::Multiset);

}  // namespace sadkit
