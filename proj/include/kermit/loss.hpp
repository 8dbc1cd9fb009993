// InfoNCE over a batch score matrix, with an additive margin on the positive
// and a temperature. Row i holds the scores of query i against every answer
// in the batch; the positive sits on the diagonal.
//
//   z_ij = (s_ij - gamma * m_ij) / tau,   loss_i = -log softmax(z_i)_i
//
// margin_mode picks m: positive_only subtracts the margin from the diagonal
// entry alone (the standard additive-margin form); literal subtracts it from
// every entry, which shifts each row uniformly and therefore cannot change
// the loss - that invariance is pinned by tests rather than optimized away,
// so the two modes stay executable documentation of the difference.
#pragma once

#include <cmath>

#include "kermit/errors.hpp"
#include "kermit/types.hpp"

namespace kermit {

enum class MarginMode : std::uint8_t { positive_only, literal };

inline const char* to_string(MarginMode mode) {
  return mode == MarginMode::positive_only ? "positive_only" : "literal";
}

inline MarginMode margin_mode_from_string(const std::string& text) {
  if (text == "positive_only") return MarginMode::positive_only;
  if (text == "literal") return MarginMode::literal;
  throw ConfigError("unknown margin mode '" + text + "'");
}

template <typename Scalar>
struct LossConfigT {
  Scalar gamma = Scalar(0.02);
  Scalar tau = Scalar(0.05);
  MarginMode margin_mode = MarginMode::positive_only;
};

using LossConfig = LossConfigT<double>;

namespace detail {

template <typename Scalar>
void check_scores(const MatrixX<Scalar>& scores) {
  if (scores.rows() != scores.cols() || scores.rows() < 1) {
    throw DimensionError("score matrix must be square and non-empty");
  }
  if (!scores.allFinite()) {
    throw NumericError("score matrix contains non-finite entries");
  }
}

// Shared forward pass; writes softmax probabilities when requested.
template <typename Scalar>
Scalar info_nce_forward(const MatrixX<Scalar>& scores,
                        const LossConfigT<Scalar>& config,
                        MatrixX<Scalar>* probabilities) {
  check_scores(scores);
  if (config.tau <= Scalar(0)) throw ArgumentError("tau must be positive");
  const Eigen::Index n = scores.rows();
  if (probabilities) probabilities->resize(n, n);

  Scalar total = Scalar(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    VectorX<Scalar> logits(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Scalar margin = Scalar(0);
      if (config.margin_mode == MarginMode::literal || j == i) {
        margin = config.gamma;
      }
      logits(j) = (scores(i, j) - margin) / config.tau;
    }
    const Scalar peak = logits.maxCoeff();
    Scalar sum = Scalar(0);
    for (Eigen::Index j = 0; j < n; ++j) sum += std::exp(logits(j) - peak);
    const Scalar log_sum_exp = peak + std::log(sum);
    total += log_sum_exp - logits(i);
    if (probabilities) {
      for (Eigen::Index j = 0; j < n; ++j) {
        (*probabilities)(i, j) = std::exp(logits(j) - log_sum_exp);
      }
    }
  }
  return total / static_cast<Scalar>(n);
}

}  // namespace detail

// Mean loss over batch rows.
template <typename Scalar>
Scalar info_nce_loss(const MatrixX<Scalar>& scores,
                     const LossConfigT<Scalar>& config) {
  return detail::info_nce_forward<Scalar>(scores, config, nullptr);
}

// Loss plus d(loss)/d(scores). The margin is constant in the scores, so both
// margin modes share the gradient form (softmax - identity) / (n * tau).
template <typename Scalar>
Scalar info_nce_loss_grad(const MatrixX<Scalar>& scores,
                          const LossConfigT<Scalar>& config,
                          MatrixX<Scalar>& d_scores) {
  MatrixX<Scalar> probabilities;
  const Scalar loss =
      detail::info_nce_forward<Scalar>(scores, config, &probabilities);
  const Eigen::Index n = scores.rows();
  const Scalar scale = Scalar(1) / (static_cast<Scalar>(n) * config.tau);
  d_scores = probabilities * scale;
  for (Eigen::Index i = 0; i < n; ++i) d_scores(i, i) -= scale;
  return loss;
}

}  // namespace kermit
