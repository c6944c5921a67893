#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sadkit/common.hpp"

namespace sadkit {

enum class LossMode { KL, CE };

Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits);
Eigen::MatrixXd log_softmax_rows(const Eigen::MatrixXd& logits);

// KL(p_T || p_S) in nats, both rows given as unnormalized logits.
double kl_per_token(const Eigen::VectorXd& teacher_logits_row,
                    const Eigen::VectorXd& student_logits_row);

// -log softmax(student)[target]
double ce_per_token(const Eigen::VectorXd& student_logits_row, int target_id);

// Sum of per-token KL over reasoning-masked positions.
double cot_loss(const Eigen::MatrixXd& teacher_logits, const Eigen::MatrixXd& student_logits,
                std::span<const std::uint8_t> m_r);

// Sum of per-token KL over action-masked positions.
double act_loss(const Eigen::MatrixXd& teacher_logits, const Eigen::MatrixXd& student_logits,
                std::span<const std::uint8_t> m_a);

double total_loss(double cot, double act, double lambda_r, double lambda_a);

// Mean per-row entropy H(p_T) over the selected positions (all rows when the
// mask span is empty).
double teacher_entropy(const Eigen::MatrixXd& teacher_logits,
                       std::span<const std::uint8_t> supervised = {});

struct LossBreakdown {
  double cot = 0.0;
  double act = 0.0;
  double total = 0.0;
  std::vector<double> per_token;  // zero wherever both masks are zero
};

LossBreakdown masked_loss(const Eigen::MatrixXd& teacher_logits,
                          const Eigen::MatrixXd& student_logits,
                          std::span<const std::uint8_t> m_r, std::span<const std::uint8_t> m_a,
                          double lambda_r, double lambda_a, LossMode mode = LossMode::KL,
                          std::span<const int> targets = {});

// Log-probabilities of the scripted-teacher target: 1 - eps on the scripted
// token, eps spread uniformly. Valid directly as a logits row.
Eigen::VectorXd smoothed_onehot_log_probs(int vocab_size, int target_id, double eps);

}  // namespace sadkit
