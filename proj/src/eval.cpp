#include "kermit/eval.hpp"

#include <algorithm>
#include <exception>
#include <string>
#include <thread>

#include "kermit/sequence.hpp"

namespace kermit {

Mat embed_all_entities(const EncoderModel& e_model,
                       const Vocabulary& vocabulary,
                       const KnowledgeGraph& graph) {
  Mat rows(static_cast<Eigen::Index>(graph.entities().size()), e_model.dim());
  for (const Entity& entity : graph.entities()) {
    const TokenSequence sequence = build_entity_sequence(
        entity_text(entity), vocabulary, static_cast<int>(e_model.max_len()));
    const Vec pooled = encode_pooled(e_model, sequence);
    const double norm = pooled.norm();
    if (norm == 0.0) {
      throw NumericError("entity '" + entity.raw_key +
                         "' embeds to the zero vector");
    }
    rows.row(entity.id) = (pooled / norm).transpose();
  }
  return rows;
}

int rank_answer(const Vec& scores, EntityId answer,
                const std::vector<EntityId>& filter) {
  if (answer < 0 || answer >= scores.size()) {
    throw ContractError("answer entity " + std::to_string(answer) +
                        " is outside the candidate range");
  }
  if (std::binary_search(filter.begin(), filter.end(), answer)) {
    throw ContractError("answer entity " + std::to_string(answer) +
                        " is in the filter set");
  }
  const double answer_score = scores(answer);
  int ahead = 0;
  std::size_t next = 0;  // cursor into the sorted filter list
  for (EntityId candidate = 0; candidate < scores.size(); ++candidate) {
    while (next < filter.size() && filter[next] < candidate) ++next;
    if (next < filter.size() && filter[next] == candidate) continue;
    if (candidate == answer) continue;
    if (scores(candidate) >= answer_score) ++ahead;
  }
  return 1 + ahead;
}

namespace {

// The filter index keys backward queries by the relation id written in the
// triple, while a backward Query carries the inverse relation (that is what
// it verbalizes). Map back before the lookup.
RelationId filter_relation(const KnowledgeGraph& graph, const Query& query) {
  return query.direction == Direction::forward
             ? query.relation
             : graph.relation(query.relation).inverse_id;
}

// Known answers for the query with the query's own answer removed, as
// rank_answer wants them.
std::vector<EntityId> filter_for(const KnowledgeGraph& graph,
                                 const FilterIndex& filter,
                                 const Query& query) {
  const std::vector<EntityId>& known = filter.known(
      query.source, filter_relation(graph, query), query.direction);
  std::vector<EntityId> result;
  result.reserve(known.size());
  for (EntityId id : known) {
    if (id != query.answer) result.push_back(id);
  }
  return result;
}

void fold_rank(Metrics& metrics, int rank) {
  metrics.mrr += 1.0 / static_cast<double>(rank);
  if (rank <= 1) metrics.hit1 += 1.0;
  if (rank <= 3) metrics.hit3 += 1.0;
  if (rank <= 10) metrics.hit10 += 1.0;
  ++metrics.n_queries;
}

void finalize(Metrics& metrics) {
  if (metrics.n_queries == 0) return;
  const double n = static_cast<double>(metrics.n_queries);
  metrics.mrr /= n;
  metrics.hit1 /= n;
  metrics.hit3 /= n;
  metrics.hit10 /= n;
}

struct EvalItem {
  Query query;
  std::string pred_text;
};

// Gathers the predictive description of every query up front so a missing
// cache entry surfaces before any ranking work starts.
std::vector<EvalItem> collect_items(const KnowledgeGraph& graph,
                                    const std::vector<Triple>& triples,
                                    SequenceMode mode,
                                    const DescriptionCache* cache) {
  std::vector<EvalItem> items;
  items.reserve(2 * triples.size());
  for (const Triple& triple : triples) {
    items.push_back({Query{triple.head, triple.relation, Direction::forward,
                           triple.tail},
                     {}});
    items.push_back({Query{triple.tail,
                           graph.relation(triple.relation).inverse_id,
                           Direction::backward, triple.head},
                     {}});
  }
  if (mode == SequenceMode::baseline) return items;
  if (cache == nullptr) {
    throw DataError(std::string("mode '") + to_string(mode) +
                    "' needs a description cache");
  }
  for (EvalItem& item : items) {
    const QueryKey key = make_query_key(graph, item.query);
    const PredictiveDescription* found = cache->find(key);
    if (found == nullptr) {
      throw DataError("no cached description for query " + key.packed());
    }
    item.pred_text = found->text;
  }
  return items;
}

}  // namespace

EvalReport evaluate_split(const KnowledgeGraph& graph,
                          const FilterIndex& filter,
                          const Checkpoint& checkpoint, Split split,
                          const DescriptionCache* cache,
                          const EvalConfig& config) {
  const std::vector<Triple>& triples = graph.triples(split);
  if (triples.empty()) {
    throw DataError(std::string("split '") + to_string(split) +
                    "' has no triples");
  }
  if (config.threads < 1) throw ArgumentError("threads must be >= 1");

  const SequenceMode mode = checkpoint.mode;
  const std::vector<EvalItem> items =
      collect_items(graph, triples, mode, cache);
  const Mat entity_rows =
      embed_all_entities(checkpoint.e_model, checkpoint.vocabulary, graph);

  std::vector<int> ranks(items.size(), 0);
  auto rank_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const Query& query = items[i].query;
      const TokenSequence sequence = build_query_sequence(
          entity_text(graph.entity(query.source)),
          graph.relation(query.relation).name, items[i].pred_text, mode,
          checkpoint.vocabulary,
          static_cast<int>(checkpoint.q_model.max_len()));
      const Vec pooled = encode_pooled(checkpoint.q_model, sequence);
      const double norm = pooled.norm();
      if (norm == 0.0) {
        throw NumericError("query " + make_query_key(graph, query).packed() +
                           " embeds to the zero vector");
      }
      const Vec scores =
          (entity_rows * (pooled / norm)).cwiseMax(-1.0).cwiseMin(1.0);
      ranks[i] =
          rank_answer(scores, query.answer, filter_for(graph, filter, query));
    }
  };

  const std::size_t n_threads = std::min<std::size_t>(
      static_cast<std::size_t>(config.threads), items.size());
  if (n_threads <= 1) {
    rank_range(0, items.size());
  } else {
    // Contiguous shards; each writes disjoint rank slots, so the outcome is
    // independent of scheduling.
    const std::size_t shard = (items.size() + n_threads - 1) / n_threads;
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> failures(n_threads);
    for (std::size_t w = 0; w < n_threads; ++w) {
      const std::size_t lo = w * shard;
      const std::size_t hi = std::min(lo + shard, items.size());
      workers.emplace_back([&, lo, hi, w] {
        try {
          rank_range(lo, hi);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
    for (std::thread& worker : workers) worker.join();
    for (const std::exception_ptr& failure : failures) {
      if (failure) std::rethrow_exception(failure);
    }
  }

  EvalReport report;
  report.queries.reserve(items.size());
  for (const EvalItem& item : items) report.queries.push_back(item.query);
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    fold_rank(i % 2 == 0 ? report.forward : report.backward, ranks[i]);
    fold_rank(report.overall, ranks[i]);
  }
  finalize(report.forward);
  finalize(report.backward);
  finalize(report.overall);
  if (config.collect_ranks) report.ranks = std::move(ranks);
  return report;
}

std::vector<Prediction> predict_topk(const KnowledgeGraph& graph,
                                     const Checkpoint& checkpoint,
                                     const DescriptionCache* cache,
                                     const OpenQuery& query, int k,
                                     const std::vector<EntityId>& filter) {
  if (k < 1) throw ArgumentError("k must be >= 1");
  const SequenceMode mode = checkpoint.mode;
  std::string pred_text;
  if (mode != SequenceMode::baseline) {
    if (cache == nullptr) {
      throw DataError(std::string("mode '") + to_string(mode) +
                      "' needs a description cache");
    }
    const QueryKey key{graph.entity(query.source).raw_key,
                       graph.relation(query.relation).raw_key,
                       query.direction};
    const PredictiveDescription* found = cache->find(key);
    if (found == nullptr) {
      throw DataError("no cached description for query " + key.packed());
    }
    pred_text = found->text;
  }

  const TokenSequence sequence = build_query_sequence(
      entity_text(graph.entity(query.source)),
      graph.relation(query.relation).name, pred_text, mode,
      checkpoint.vocabulary, static_cast<int>(checkpoint.q_model.max_len()));
  const Vec pooled = encode_pooled(checkpoint.q_model, sequence);
  const double norm = pooled.norm();
  if (norm == 0.0) throw NumericError("query embeds to the zero vector");
  const Mat entity_rows =
      embed_all_entities(checkpoint.e_model, checkpoint.vocabulary, graph);
  const Vec scores =
      (entity_rows * (pooled / norm)).cwiseMax(-1.0).cwiseMin(1.0);

  std::vector<Prediction> candidates;
  candidates.reserve(static_cast<std::size_t>(scores.size()));
  std::size_t next = 0;
  for (EntityId candidate = 0; candidate < scores.size(); ++candidate) {
    while (next < filter.size() && filter[next] < candidate) ++next;
    if (next < filter.size() && filter[next] == candidate) continue;
    candidates.push_back({candidate, scores(candidate)});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Prediction& a, const Prediction& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.entity < b.entity;
            });
  if (candidates.size() > static_cast<std::size_t>(k)) {
    candidates.resize(static_cast<std::size_t>(k));
  }
  return candidates;
}

}  // namespace kermit
