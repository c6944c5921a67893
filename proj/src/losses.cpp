#include "sadkit/losses.hpp"

#include <cmath>

namespace sadkit {

Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits) {
  const double max = logits.maxCoeff();
  const double lse = std::log((logits.array() - max).exp().sum()) + max;
  return logits.array() - lse;
}

Eigen::MatrixXd log_softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    out.row(r) = log_softmax(logits.row(r).transpose()).transpose();
  }
  return out;
}

double kl_per_token(const Eigen::VectorXd& teacher_logits_row,
                    const Eigen::VectorXd& student_logits_row) {
  if (teacher_logits_row.size() != student_logits_row.size()) {
    throw SadError(ErrorKind::ShapeMismatch, "teacher/student vocab size mismatch");
  }
  const Eigen::VectorXd log_t = log_softmax(teacher_logits_row);
  const Eigen::VectorXd log_s = log_softmax(student_logits_row);
  return (log_t.array().exp() * (log_t - log_s).array()).sum();
}

double ce_per_token(const Eigen::VectorXd& student_logits_row, int target_id) {
  if (target_id < 0 || target_id >= student_logits_row.size()) {
    throw SadError(ErrorKind::IdOutOfRange, "CE target outside vocab");
  }
  return -log_softmax(student_logits_row)(target_id);
}

namespace {

double masked_kl_sum(const Eigen::MatrixXd& teacher_logits,
                     const Eigen::MatrixXd& student_logits,
                     std::span<const std::uint8_t> mask) {
  if (teacher_logits.rows() != student_logits.rows() ||
      teacher_logits.cols() != student_logits.cols() ||
      static_cast<std::size_t>(teacher_logits.rows()) != mask.size()) {
    throw SadError(ErrorKind::ShapeMismatch, "masked loss shape mismatch");
  }
  double sum = 0.0;
  for (Eigen::Index t = 0; t < teacher_logits.rows(); ++t) {
    if (!mask[static_cast<std::size_t>(t)]) continue;
    sum += kl_per_token(teacher_logits.row(t).transpose(), student_logits.row(t).transpose());
  }
  return sum;
}

}  // namespace

double cot_loss(const Eigen::MatrixXd& teacher_logits, const Eigen::MatrixXd& student_logits,
                std::span<const std::uint8_t> m_r) {
  return masked_kl_sum(teacher_logits, student_logits, m_r);
}

double act_loss(const Eigen::MatrixXd& teacher_logits, const Eigen::MatrixXd& student_logits,
                std::span<const std::uint8_t> m_a) {
  return masked_kl_sum(teacher_logits, student_logits, m_a);
}

double total_loss(double cot, double act, double lambda_r, double lambda_a) {
  if (lambda_r < 0.0 || lambda_a < 0.0) {
    throw SadError(ErrorKind::NegativeWeight, "loss weights must be >= 0");
  }
  return lambda_r * cot + lambda_a * act;
}

double teacher_entropy(const Eigen::MatrixXd& teacher_logits,
                       std::span<const std::uint8_t> supervised) {
  double sum = 0.0;
  std::size_t n = 0;
  for (Eigen::Index t = 0; t < teacher_logits.rows(); ++t) {
    if (!supervised.empty() && !supervised[static_cast<std::size_t>(t)]) continue;
    const Eigen::VectorXd log_p = log_softmax(teacher_logits.row(t).transpose());
    sum += -(log_p.array().exp() * log_p.array()).sum();
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

LossBreakdown masked_loss(const Eigen::MatrixXd& teacher_logits,
                          const Eigen::MatrixXd& student_logits,
                          std::span<const std::uint8_t> m_r, std::span<const std::uint8_t> m_a,
                          double lambda_r, double lambda_a, LossMode mode,
                          std::span<const int> targets) {
  if (lambda_r < 0.0 || lambda_a < 0.0) {
    throw SadError(ErrorKind::NegativeWeight, "loss weights must be >= 0");
  }
  const std::size_t T = m_r.size();
  if (m_a.size() != T || static_cast<std::size_t>(student_logits.rows()) != T) {
    throw SadError(ErrorKind::ShapeMismatch, "mask/logit length mismatch");
  }
  if (mode == LossMode::CE && targets.size() != T) {
    throw SadError(ErrorKind::ShapeMismatch, "CE mode requires per-position targets");
  }

  LossBreakdown out;
  out.per_token.assign(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    if (!m_r[t] && !m_a[t]) continue;
    const Eigen::Index row = static_cast<Eigen::Index>(t);
    double value;
    if (mode == LossMode::KL) {
      value = kl_per_token(teacher_logits.row(row).transpose(),
                           student_logits.row(row).transpose());
    } else {
      value = ce_per_token(student_logits.row(row).transpose(), targets[t]);
    }
    if (m_r[t]) {
      out.cot += value;
      out.per_token[t] = lambda_r * value;
    } else {
      out.act += value;
      out.per_token[t] = lambda_a * value;
    }
  }
  out.total = total_loss(out.cot, out.act, lambda_r, lambda_a);
  return out;
}

Eigen::VectorXd smoothed_onehot_log_probs(int vocab_size, int target_id, double eps) {
  if (target_id < 0 || target_id >= vocab_size) {
    throw SadError(ErrorKind::IdOutOfRange, "teacher target outside vocab");
  }
  Eigen::VectorXd p = Eigen::VectorXd::Constant(vocab_size, eps / vocab_size);
  p(target_id) += 1.0 - eps;
  return p.array().log();
}

}  // namespace sadkit
