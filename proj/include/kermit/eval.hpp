// Filtered-protocol link prediction: every entity is a candidate, known
// answers other than the one being ranked are excluded, and ties count
// against the model (the answer ranks below every candidate with an equal
// score). Each triple is evaluated in both directions - tail prediction from
// (h, r) and head prediction from (t, r') - so a split of T triples yields
// 2T ranked queries, pooled into one metric set.
#pragma once

#include <cstddef>
#include <vector>

#include "kermit/checkpoint.hpp"
#include "kermit/describe.hpp"
#include "kermit/encoder.hpp"
#include "kermit/kg.hpp"

namespace kermit {

struct Metrics {
  double mrr = 0.0;
  double hit1 = 0.0;
  double hit3 = 0.0;
  double hit10 = 0.0;
  std::size_t n_queries = 0;
};

// Unit-norm pooled embedding of every entity, one row per EntityId, in id
// order. Throws NumericError if any entity embeds to the zero vector.
Mat embed_all_entities(const EncoderModel& e_model,
                       const Vocabulary& vocabulary,
                       const KnowledgeGraph& graph);

// Rank of `answer` within `scores` (one score per entity). Entities in
// `filter` are excluded from the candidate list; the answer must not be
// among them (ContractError otherwise). Candidates scoring strictly higher
// than the answer and candidates tying it all rank ahead of it, so rank =
// 1 + |{j excluded-free, j != answer : s_j >= s_answer}|.
// `filter` must be sorted ascending.
int rank_answer(const Vec& scores, EntityId answer,
                const std::vector<EntityId>& filter);

struct EvalConfig {
  int threads = 1;             // ranking parallelism; results are identical
  bool collect_ranks = false;  // keep the per-query ranks in the report
};

struct EvalReport {
  Metrics overall;   // both directions pooled: the headline numbers
  Metrics forward;   // tail prediction only
  Metrics backward;  // head prediction only
  // Per-query ranks when collect_ranks is set: for triple index t, entry 2t
  // is the forward rank and 2t+1 the backward rank.
  std::vector<int> ranks;
  // The queries behind those ranks, in the same order (always filled).
  std::vector<Query> queries;
};

// Ranks every query of the split with the checkpoint's towers and sequence
// mode, filtering each query's known answers (over train, valid and test)
// except the one being ranked. Modes other than baseline read the predictive
// description of each query from the cache; a missing entry (or a null
// cache) is a DataError, as is an empty split.
EvalReport evaluate_split(const KnowledgeGraph& graph,
                          const FilterIndex& filter,
                          const Checkpoint& checkpoint, Split split,
                          const DescriptionCache* cache,
                          const EvalConfig& config = {});

struct Prediction {
  EntityId entity;
  double score;
};

// Top-k completions for an open query. Entities in `filter` (sorted
// ascending) are excluded outright; the rest are ordered by score descending
// with ties broken by ascending entity id. Returns fewer than k entries when
// fewer candidates remain. Throws ArgumentError for k < 1.
std::vector<Prediction> predict_topk(const KnowledgeGraph& graph,
                                     const Checkpoint& checkpoint,
                                     const DescriptionCache* cache,
                                     const OpenQuery& query, int k,
                                     const std::vector<EntityId>& filter);

}  // namespace kermit
