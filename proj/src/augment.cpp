#include "kermit/augment.hpp"

#include "kermit/errors.hpp"

namespace kermit {

RelationId invert_relation(const KnowledgeGraph& graph,
                           const InverseRegistry& registry,
                           RelationId relation) {
  const Relation& r = graph.relation(relation);
  const std::string& inverse_key = registry.inverse_key(r.raw_key);
  const auto inverse_id = graph.find_relation(inverse_key);
  if (!inverse_id) {
    throw LookupError("inverse relation '" + inverse_key +
                      "' is not interned in the graph");
  }
  return *inverse_id;
}

std::vector<Query> symmetrize(const KnowledgeGraph& graph,
                              const InverseRegistry& registry, Split split) {
  const std::vector<Triple>& triples = graph.triples(split);

  // Resolve each distinct relation once; also validates registration.
  std::vector<RelationId> inverse_of(graph.relations().size(), -1);
  std::vector<Query> queries;
  queries.reserve(triples.size() * 2);
  for (const Triple& t : triples) {
    RelationId& inverse = inverse_of[static_cast<std::size_t>(t.relation)];
    if (inverse < 0) inverse = invert_relation(graph, registry, t.relation);
    queries.push_back(Query{t.head, t.relation, Direction::forward, t.tail});
    queries.push_back(Query{t.tail, inverse, Direction::backward, t.head});
  }
  return queries;
}

std::pair<std::string, std::string> verbalize_relation(
    const InverseRegistry& registry, const std::string& raw_key) {
  return registry.verbalize(raw_key);
}

}  // namespace kermit
