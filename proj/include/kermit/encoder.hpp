// Shallow reference encoder: a token sequence is embedded as the sum of
// token, position and segment embeddings per position, then pooled to a
// single vector (masked mean by default, or the [CLS] row). The query tower
// and the entity tower are separate parameter sets of this same shape,
// initialized identically and trained apart.
//
// Types are templated on the scalar so the training path can run in double
// while checkpoints store float32.
#pragma once

#include <cmath>
#include <cstdint>

#include "kermit/errors.hpp"
#include "kermit/rng.hpp"
#include "kermit/sequence.hpp"
#include "kermit/types.hpp"

namespace kermit {

enum class Pooling : std::uint8_t { mean, cls };

inline const char* to_string(Pooling pooling) {
  return pooling == Pooling::mean ? "mean" : "cls";
}

inline Pooling pooling_from_string(const std::string& text) {
  if (text == "mean") return Pooling::mean;
  if (text == "cls") return Pooling::cls;
  throw ConfigError("unknown pooling '" + text + "'");
}

template <typename Scalar>
struct EncoderModelT {
  MatrixX<Scalar> token_table;     // |V| x d
  MatrixX<Scalar> position_table;  // max_len x d
  MatrixX<Scalar> segment_table;   // 3 x d
  Pooling pooling = Pooling::mean;

  Eigen::Index dim() const { return token_table.cols(); }
  Eigen::Index max_len() const { return position_table.rows(); }
  Eigen::Index vocab_size() const { return token_table.rows(); }

  // Deterministic N(0, 0.02^2) initialization; identical seeds give
  // identical tables, which is how the two towers start as twins.
  static EncoderModelT init(std::size_t vocab_size, int max_len, int d,
                            Pooling pooling, std::uint64_t seed) {
    if (max_len < 1 || d < 1 || vocab_size < 4) {
      throw ArgumentError("encoder model shape is degenerate");
    }
    EncoderModelT model;
    model.pooling = pooling;
    model.token_table.resize(static_cast<Eigen::Index>(vocab_size), d);
    model.position_table.resize(max_len, d);
    model.segment_table.resize(3, d);
    SplitMix64 rng(seed);
    for (auto* table :
         {&model.token_table, &model.position_table, &model.segment_table}) {
      for (Eigen::Index r = 0; r < table->rows(); ++r) {
        for (Eigen::Index c = 0; c < table->cols(); ++c) {
          (*table)(r, c) = static_cast<Scalar>(0.02 * rng.gaussian());
        }
      }
    }
    return model;
  }
};

template <typename Scalar>
struct EncodedSequenceT {
  MatrixX<Scalar> per_token;  // length x d, rows for padded positions are 0
  VectorX<Scalar> pooled;     // d
};

using EncoderModel = EncoderModelT<double>;
using EncodedSequence = EncodedSequenceT<double>;

namespace detail {

template <typename Scalar>
void check_sequence(const EncoderModelT<Scalar>& model,
                    const TokenSequence& sequence) {
  const auto length = static_cast<Eigen::Index>(sequence.length());
  if (length < 1 || length > model.max_len()) {
    throw DimensionError("sequence length " + std::to_string(length) +
                         " exceeds position table rows " +
                         std::to_string(model.max_len()));
  }
  for (const std::int32_t id : sequence.token_ids) {
    if (id < 0 || id >= model.vocab_size()) {
      throw DimensionError("token id " + std::to_string(id) +
                           " outside the embedding table");
    }
  }
}

}  // namespace detail

// Pooled embedding only; the workhorse for scoring and training.
template <typename Scalar>
VectorX<Scalar> encode_pooled(const EncoderModelT<Scalar>& model,
                              const TokenSequence& sequence) {
  detail::check_sequence(model, sequence);
  const auto length = static_cast<Eigen::Index>(sequence.length());
  VectorX<Scalar> pooled = VectorX<Scalar>::Zero(model.dim());
  if (model.pooling == Pooling::cls) {
    pooled = (model.token_table.row(sequence.token_ids[0]) +
              model.position_table.row(0) +
              model.segment_table.row(sequence.segment_ids[0]))
                 .transpose();
    return pooled;
  }
  int n = 0;
  for (Eigen::Index p = 0; p < length; ++p) {
    if (!sequence.mask[static_cast<std::size_t>(p)]) continue;
    pooled += (model.token_table.row(sequence.token_ids[static_cast<std::size_t>(p)]) +
               model.position_table.row(p) +
               model.segment_table.row(sequence.segment_ids[static_cast<std::size_t>(p)]))
                  .transpose();
    ++n;
  }
  if (n == 0) throw ContractError("sequence has no masked positions to pool");
  pooled /= static_cast<Scalar>(n);
  return pooled;
}

// Full per-position view. Padded positions get zero rows; pooled always
// equals the pooling function applied to per_token under the mask.
template <typename Scalar>
EncodedSequenceT<Scalar> encode(const EncoderModelT<Scalar>& model,
                                const TokenSequence& sequence) {
  detail::check_sequence(model, sequence);
  const auto length = static_cast<Eigen::Index>(sequence.length());
  EncodedSequenceT<Scalar> encoded;
  encoded.per_token = MatrixX<Scalar>::Zero(length, model.dim());
  for (Eigen::Index p = 0; p < length; ++p) {
    if (!sequence.mask[static_cast<std::size_t>(p)]) continue;
    encoded.per_token.row(p) =
        model.token_table.row(sequence.token_ids[static_cast<std::size_t>(p)]) +
        model.position_table.row(p) +
        model.segment_table.row(sequence.segment_ids[static_cast<std::size_t>(p)]);
  }
  encoded.pooled = encode_pooled(model, sequence);
  return encoded;
}

// Cosine similarity of two vector expressions, clamped to [-1, 1].
// Throws NumericError on a zero-norm input.
template <typename DerivedU, typename DerivedV>
typename DerivedU::Scalar cosine_similarity(
    const Eigen::MatrixBase<DerivedU>& u, const Eigen::MatrixBase<DerivedV>& v) {
  using Scalar = typename DerivedU::Scalar;
  const Scalar nu = u.norm();
  const Scalar nv = v.norm();
  if (nu == Scalar(0) || nv == Scalar(0)) {
    throw NumericError("cosine similarity of a zero-norm vector");
  }
  const Scalar value = u.dot(v) / (nu * nv);
  if (!std::isfinite(static_cast<double>(value))) {
    throw NumericError("cosine similarity is not finite");
  }
  return std::clamp(value, Scalar(-1), Scalar(1));
}

}  // namespace kermit
