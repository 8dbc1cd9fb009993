// Bi-encoder training: batching with in-batch negatives, exact reverse-mode
// gradients for the shallow encoder, decoupled-weight-decay adaptive updates
// with a linear learning-rate schedule, and a fully deterministic fit loop.
#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "kermit/describe.hpp"
#include "kermit/encoder.hpp"
#include "kermit/kg.hpp"
#include "kermit/loss.hpp"

namespace kermit {

// B query sequences with their answer sequences; positives on the diagonal.
// Answer entities are distinct within a batch (duplicates are dropped at
// batching time, keeping the first), so no negative is secretly a positive.
struct TrainBatch {
  std::vector<TokenSequence> queries;
  std::vector<TokenSequence> answers;
  std::vector<EntityId> answer_ids;

  std::size_t size() const { return queries.size(); }
  void validate() const;  // ContractError / BatchError on violation
};

template <typename Scalar>
struct GradientsT {
  MatrixX<Scalar> q_token, q_position, q_segment;
  MatrixX<Scalar> e_token, e_position, e_segment;

  static GradientsT zeros_like(const EncoderModelT<Scalar>& q_model,
                               const EncoderModelT<Scalar>& e_model) {
    GradientsT g;
    g.q_token = MatrixX<Scalar>::Zero(q_model.token_table.rows(), q_model.dim());
    g.q_position =
        MatrixX<Scalar>::Zero(q_model.position_table.rows(), q_model.dim());
    g.q_segment = MatrixX<Scalar>::Zero(3, q_model.dim());
    g.e_token = MatrixX<Scalar>::Zero(e_model.token_table.rows(), e_model.dim());
    g.e_position =
        MatrixX<Scalar>::Zero(e_model.position_table.rows(), e_model.dim());
    g.e_segment = MatrixX<Scalar>::Zero(3, e_model.dim());
    return g;
  }
};

using Gradients = GradientsT<double>;

// Cosine score matrix for a batch: rows are queries, columns are answers,
// entries clamped to [-1, 1]. Throws BatchError for B < 2, NumericError on a
// zero-norm pooled embedding.
template <typename Scalar>
MatrixX<Scalar> score_batch(const EncoderModelT<Scalar>& q_model,
                            const EncoderModelT<Scalar>& e_model,
                            const TrainBatch& batch);

// Scatters d(loss)/d(pooled) back through the pooling and the embedding sum
// into dense per-table gradients, accumulating in a fixed order. Rows of the
// embedding tables not touched by the batch keep exactly zero gradient.
// Returns the loss value.
template <typename Scalar>
Scalar compute_gradients(const EncoderModelT<Scalar>& q_model,
                         const EncoderModelT<Scalar>& e_model,
                         const TrainBatch& batch,
                         const LossConfigT<Scalar>& loss_config,
                         GradientsT<Scalar>& gradients);

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 50;
  int batch_size = 256;  // scaled down automatically to the query count
  std::uint64_t seed = 42;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int d = 64;
  int max_len = 64;
  Pooling pooling = Pooling::mean;
  int min_vocab_frequency = 2;
  int checkpoint_every = 0;            // 0 = only the final checkpoint
  std::filesystem::path checkpoint_dir;  // empty = keep models in memory only
};

struct TrainResult {
  EncoderModel q_model;
  EncoderModel e_model;
  Vocabulary vocabulary;
  std::vector<double> epoch_loss;  // mean per-query loss, one entry per epoch
  std::size_t steps = 0;
  double wall_seconds = 0.0;
  std::filesystem::path final_checkpoint;  // empty when checkpoint_dir unset
};

// Pure function of (n, seed, epoch): the visit order of queries in an epoch.
std::vector<std::size_t> epoch_shuffle(std::size_t n, std::uint64_t seed,
                                       int epoch);

// Trains both towers from scratch. The vocabulary is built from entity
// names, descriptions, relation names and (for modes that use them) the
// cached predictive descriptions of the given queries. Modes other than
// baseline require every query to have a cache entry (DataError otherwise).
// Identical inputs and config produce bit-identical results.
TrainResult fit(const KnowledgeGraph& graph, const std::vector<Query>& queries,
                const DescriptionCache* cache, const TrainConfig& train_config,
                const LossConfig& loss_config, SequenceMode mode);

// --- template definitions -------------------------------------------------

namespace detail {

// Pooled embeddings for one side of a batch, as matrix rows.
template <typename Scalar>
MatrixX<Scalar> pool_side(const EncoderModelT<Scalar>& model,
                          const std::vector<TokenSequence>& sequences) {
  MatrixX<Scalar> pooled(static_cast<Eigen::Index>(sequences.size()),
                         model.dim());
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    pooled.row(static_cast<Eigen::Index>(i)) =
        encode_pooled(model, sequences[i]).transpose();
  }
  return pooled;
}

template <typename Scalar>
VectorX<Scalar> row_norms_checked(const MatrixX<Scalar>& rows,
                                  const char* side) {
  VectorX<Scalar> norms = rows.rowwise().norm();
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    if (norms(i) == Scalar(0)) {
      throw NumericError(std::string(side) + " embedding " + std::to_string(i) +
                         " has zero norm");
    }
  }
  return norms;
}

// Distributes a pooled-vector gradient onto the three embedding tables.
template <typename Scalar>
void scatter_sequence_gradient(const EncoderModelT<Scalar>& model,
                               const TokenSequence& sequence,
                               const VectorX<Scalar>& d_pooled,
                               MatrixX<Scalar>& d_token,
                               MatrixX<Scalar>& d_position,
                               MatrixX<Scalar>& d_segment) {
  if (model.pooling == Pooling::cls) {
    d_token.row(sequence.token_ids[0]) += d_pooled.transpose();
    d_position.row(0) += d_pooled.transpose();
    d_segment.row(sequence.segment_ids[0]) += d_pooled.transpose();
    return;
  }
  const int n = sequence.n_valid();
  const VectorX<Scalar> share = d_pooled / static_cast<Scalar>(n);
  for (std::size_t p = 0; p < sequence.length(); ++p) {
    if (!sequence.mask[p]) continue;
    d_token.row(sequence.token_ids[p]) += share.transpose();
    d_position.row(static_cast<Eigen::Index>(p)) += share.transpose();
    d_segment.row(sequence.segment_ids[p]) += share.transpose();
  }
}

}  // namespace detail

template <typename Scalar>
MatrixX<Scalar> score_batch(const EncoderModelT<Scalar>& q_model,
                            const EncoderModelT<Scalar>& e_model,
                            const TrainBatch& batch) {
  batch.validate();
  const MatrixX<Scalar> q = detail::pool_side(q_model, batch.queries);
  const MatrixX<Scalar> e = detail::pool_side(e_model, batch.answers);
  const VectorX<Scalar> qn = detail::row_norms_checked(q, "query");
  const VectorX<Scalar> en = detail::row_norms_checked(e, "answer");
  MatrixX<Scalar> scores =
      (qn.cwiseInverse().asDiagonal() * q) *
      (en.cwiseInverse().asDiagonal() * e).transpose();
  return scores.cwiseMax(Scalar(-1)).cwiseMin(Scalar(1));
}

template <typename Scalar>
Scalar compute_gradients(const EncoderModelT<Scalar>& q_model,
                         const EncoderModelT<Scalar>& e_model,
                         const TrainBatch& batch,
                         const LossConfigT<Scalar>& loss_config,
                         GradientsT<Scalar>& gradients) {
  batch.validate();
  const MatrixX<Scalar> q = detail::pool_side(q_model, batch.queries);
  const MatrixX<Scalar> e = detail::pool_side(e_model, batch.answers);
  const VectorX<Scalar> q_norm = detail::row_norms_checked(q, "query");
  const VectorX<Scalar> e_norm = detail::row_norms_checked(e, "answer");
  const MatrixX<Scalar> q_unit = q_norm.cwiseInverse().asDiagonal() * q;
  const MatrixX<Scalar> e_unit = e_norm.cwiseInverse().asDiagonal() * e;
  const MatrixX<Scalar> scores = q_unit * e_unit.transpose();

  MatrixX<Scalar> d_scores;
  const Scalar loss =
      info_nce_loss_grad<Scalar>(scores, loss_config, d_scores);

  // Cosine backward. With u' = u/|u|, v' = v/|v| and s = u'.v':
  //   ds/du = (v' - s u') / |u|,  ds/dv = (u' - s v') / |v|.
  const VectorX<Scalar> row_dot =
      (d_scores.cwiseProduct(scores)).rowwise().sum();
  const VectorX<Scalar> col_dot =
      (d_scores.cwiseProduct(scores)).colwise().sum().transpose();
  const MatrixX<Scalar> d_q = q_norm.cwiseInverse().asDiagonal() *
                              (d_scores * e_unit - row_dot.asDiagonal() * q_unit);
  const MatrixX<Scalar> d_e =
      e_norm.cwiseInverse().asDiagonal() *
      (d_scores.transpose() * q_unit - col_dot.asDiagonal() * e_unit);

  gradients = GradientsT<Scalar>::zeros_like(q_model, e_model);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const VectorX<Scalar> d_pooled =
        d_q.row(static_cast<Eigen::Index>(i)).transpose();
    detail::scatter_sequence_gradient(q_model, batch.queries[i], d_pooled,
                                      gradients.q_token, gradients.q_position,
                                      gradients.q_segment);
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const VectorX<Scalar> d_pooled =
        d_e.row(static_cast<Eigen::Index>(i)).transpose();
    detail::scatter_sequence_gradient(e_model, batch.answers[i], d_pooled,
                                      gradients.e_token, gradients.e_position,
                                      gradients.e_segment);
  }
  return loss;
}

}  // namespace kermit
