// Core identifier and triple types shared by every module, plus the dense
// matrix aliases the numeric code is written against. Matrices are row-major
// so serialized tables round-trip by plain row order.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace kermit {

// Dense integer ids, assigned by interning order. Opaque outside the graph.
using EntityId = std::int32_t;
using RelationId = std::int32_t;

enum class Direction : std::uint8_t { forward, backward };

inline const char* to_string(Direction d) {
  return d == Direction::forward ? "fwd" : "bwd";
}

enum class Split : std::uint8_t { train, valid, test };

inline const char* to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::valid: return "valid";
    default: return "test";
  }
}

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;

  bool operator==(const Triple&) const = default;
};

// One ranking task: given a source entity and a relation, find the answer.
// Backward queries carry the inverse relation id, so `relation` is always the
// relation whose surface name appears in the encoded text.
struct Query {
  EntityId source;
  RelationId relation;
  Direction direction;
  EntityId answer;

  bool operator==(const Query&) const = default;
};

// A query with the answer unknown, as issued by ad-hoc prediction.
struct OpenQuery {
  EntityId source;
  RelationId relation;
  Direction direction;
};

template <typename Scalar>
using MatrixX =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Mat = MatrixX<double>;
using Vec = VectorX<double>;

}  // namespace kermit
