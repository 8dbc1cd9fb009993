#include "kermit/kg.hpp"

#include <algorithm>
#include <unordered_set>

#include "kermit/errors.hpp"
#include "kermit/util.hpp"

namespace kermit {

std::string entity_text(const Entity& entity) {
  return entity.name + ": " + entity.description;
}

const std::vector<Triple>& KnowledgeGraph::triples(Split split) const {
  switch (split) {
    case Split::train: return train_;
    case Split::valid: return valid_;
    default: return test_;
  }
}

const Entity& KnowledgeGraph::entity(EntityId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= entities_.size()) {
    throw LookupError("entity id out of range: " + std::to_string(id));
  }
  return entities_[static_cast<std::size_t>(id)];
}

const Relation& KnowledgeGraph::relation(RelationId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= relations_.size()) {
    throw LookupError("relation id out of range: " + std::to_string(id));
  }
  return relations_[static_cast<std::size_t>(id)];
}

std::optional<EntityId> KnowledgeGraph::find_entity(
    std::string_view raw_key) const {
  const auto it = entity_ids_.find(std::string(raw_key));
  if (it == entity_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationId> KnowledgeGraph::find_relation(
    std::string_view raw_key) const {
  const auto it = relation_ids_.find(std::string(raw_key));
  if (it == relation_ids_.end()) return std::nullopt;
  return it->second;
}

EntityId KnowledgeGraph::entity_id(std::string_view raw_key) const {
  const auto id = find_entity(raw_key);
  if (!id) throw LookupError("unknown entity '" + std::string(raw_key) + "'");
  return *id;
}

RelationId KnowledgeGraph::relation_id(std::string_view raw_key) const {
  const auto id = find_relation(raw_key);
  if (!id) throw LookupError("unknown relation '" + std::string(raw_key) + "'");
  return *id;
}

KnowledgeGraph KnowledgeGraph::assemble(std::vector<Entity> entities,
                                        std::vector<Relation> relations,
                                        InverseRegistry registry,
                                        std::vector<Triple> train,
                                        std::vector<Triple> valid,
                                        std::vector<Triple> test,
                                        std::vector<std::string> warnings) {
  KnowledgeGraph graph;
  graph.entities_ = std::move(entities);
  graph.relations_ = std::move(relations);
  graph.registry_ = std::move(registry);
  graph.train_ = std::move(train);
  graph.valid_ = std::move(valid);
  graph.test_ = std::move(test);
  graph.warnings_ = std::move(warnings);
  for (const Entity& e : graph.entities_) {
    graph.entity_ids_.emplace(e.raw_key, e.id);
  }
  for (const Relation& r : graph.relations_) {
    graph.relation_ids_.emplace(r.raw_key, r.id);
  }
  std::unordered_set<RelationId> used;
  for (const auto* split : {&graph.train_, &graph.valid_, &graph.test_}) {
    for (const Triple& t : *split) used.insert(t.relation);
  }
  graph.n_triple_relations_ = used.size();
  return graph;
}

namespace {

struct TripleHash {
  std::size_t operator()(const Triple& t) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint64_t v :
         {static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.head)),
          static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.relation)),
          static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.tail))}) {
      h ^= v;
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

std::filesystem::path resolve(const std::filesystem::path& directory,
                              const std::string& file) {
  std::filesystem::path p(file);
  return p.is_absolute() ? p : directory / p;
}

std::vector<Entity> load_entities(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<Entity> entities;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  for (const std::string& line : split_char(text, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    const auto where = path.filename().string() + ":" + std::to_string(line_no);
    const std::size_t first = line.find('\t');
    if (first == std::string::npos) {
      throw LoadError(where + ": expected key<TAB>name[<TAB>description]");
    }
    const std::size_t second = line.find('\t', first + 1);
    Entity entity;
    entity.raw_key = line.substr(0, first);
    if (second == std::string::npos) {
      entity.name = line.substr(first + 1);
    } else {
      entity.name = line.substr(first + 1, second - first - 1);
      entity.description = line.substr(second + 1);
    }
    if (entity.raw_key.empty()) throw LoadError(where + ": empty entity key");
    if (entity.name.empty()) throw LoadError(where + ": empty entity name");
    if (!seen.insert(entity.raw_key).second) {
      throw LoadError(where + ": duplicate entity key '" + entity.raw_key +
                      "'");
    }
    entity.id = static_cast<EntityId>(entities.size());
    entities.push_back(std::move(entity));
  }
  return entities;
}

std::vector<Triple> load_split(
    const std::filesystem::path& path,
    const std::unordered_map<std::string, EntityId>& entity_ids,
    const std::unordered_map<std::string, RelationId>& relation_ids,
    std::unordered_set<Triple, TripleHash>& earlier_splits,
    std::vector<std::string>& warnings) {
  const std::string text = read_text_file(path);
  const std::string file = path.filename().string();
  std::vector<Triple> triples;
  std::unordered_set<Triple, TripleHash> seen;
  std::size_t line_no = 0;
  std::size_t duplicates = 0;
  std::size_t cross_split = 0;
  for (const std::string& line : split_char(text, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    const auto where = file + ":" + std::to_string(line_no);
    const auto fields = split_char(line, '\t');
    if (fields.size() != 3) {
      throw LoadError(where + ": expected head<TAB>relation<TAB>tail");
    }
    const auto head = entity_ids.find(fields[0]);
    if (head == entity_ids.end()) {
      throw IntegrityError(where + ": unknown entity '" + fields[0] + "'");
    }
    const auto relation = relation_ids.find(fields[1]);
    if (relation == relation_ids.end()) {
      throw IntegrityError(where + ": unknown relation '" + fields[1] + "'");
    }
    const auto tail = entity_ids.find(fields[2]);
    if (tail == entity_ids.end()) {
      throw IntegrityError(where + ": unknown entity '" + fields[2] + "'");
    }
    const Triple triple{head->second, relation->second, tail->second};
    if (!seen.insert(triple).second) {
      ++duplicates;
      continue;
    }
    if (earlier_splits.count(triple)) {
      ++cross_split;
      continue;
    }
    triples.push_back(triple);
  }
  if (duplicates > 0) {
    warnings.push_back(file + ": dropped " + std::to_string(duplicates) +
                       " duplicate triple(s)");
  }
  if (cross_split > 0) {
    warnings.push_back(file + ": dropped " + std::to_string(cross_split) +
                       " triple(s) already present in an earlier split");
  }
  for (const Triple& t : triples) earlier_splits.insert(t);
  return triples;
}

}  // namespace

KnowledgeGraph load_dataset(const std::filesystem::path& directory,
                            const DatasetFormat& format) {
  InverseRegistry registry =
      InverseRegistry::load(resolve(directory, format.relations_file));

  std::vector<Relation> relations;
  relations.reserve(registry.size());
  std::unordered_map<std::string, RelationId> relation_ids;
  for (const std::string& key : registry.keys()) {
    Relation relation;
    relation.id = static_cast<RelationId>(relations.size());
    relation.raw_key = key;
    relation.name = registry.at(key).name;
    relation.inverse_id = -1;
    relation_ids.emplace(key, relation.id);
    relations.push_back(std::move(relation));
  }
  for (Relation& relation : relations) {
    relation.inverse_id = relation_ids.at(registry.inverse_key(relation.raw_key));
  }

  std::vector<Entity> entities =
      load_entities(resolve(directory, format.entities_file));
  std::unordered_map<std::string, EntityId> entity_ids;
  for (const Entity& e : entities) entity_ids.emplace(e.raw_key, e.id);

  std::vector<std::string> warnings;
  std::unordered_set<Triple, TripleHash> earlier;
  auto train = load_split(resolve(directory, format.train_file), entity_ids,
                          relation_ids, earlier, warnings);
  auto valid = load_split(resolve(directory, format.valid_file), entity_ids,
                          relation_ids, earlier, warnings);
  auto test = load_split(resolve(directory, format.test_file), entity_ids,
                         relation_ids, earlier, warnings);
  for (const std::string& w : warnings) log_warn(w);

  return KnowledgeGraph::assemble(std::move(entities), std::move(relations),
                                  std::move(registry), std::move(train),
                                  std::move(valid), std::move(test),
                                  std::move(warnings));
}

std::uint64_t FilterIndex::pack(EntityId source, RelationId relation,
                                Direction direction) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(source)) << 32) |
         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(relation)) << 1) |
         (direction == Direction::backward ? 1u : 0u);
}

const std::vector<EntityId>& FilterIndex::known(EntityId source,
                                                RelationId relation,
                                                Direction direction) const {
  static const std::vector<EntityId> empty;
  const auto it = index_.find(pack(source, relation, direction));
  return it == index_.end() ? empty : it->second;
}

bool FilterIndex::contains(EntityId source, RelationId relation,
                           Direction direction, EntityId candidate) const {
  const auto& set = known(source, relation, direction);
  return std::binary_search(set.begin(), set.end(), candidate);
}

FilterIndex build_filter_index(const KnowledgeGraph& graph) {
  FilterIndex index;
  for (const Split split : {Split::train, Split::valid, Split::test}) {
    for (const Triple& t : graph.triples(split)) {
      if (t.relation >= (1 << 30)) {
        throw IntegrityError("relation id exceeds filter index capacity");
      }
      index.index_[FilterIndex::pack(t.head, t.relation, Direction::forward)]
          .push_back(t.tail);
      index.index_[FilterIndex::pack(t.tail, t.relation, Direction::backward)]
          .push_back(t.head);
    }
  }
  for (auto& [key, answers] : index.index_) {
    std::sort(answers.begin(), answers.end());
    answers.erase(std::unique(answers.begin(), answers.end()), answers.end());
  }
  return index;
}

}  // namespace kermit
