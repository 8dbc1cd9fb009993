// Knowledge graph core: interned entities/relations, triple splits, and the
// filter index used by the filtered evaluation protocol.
//
// Dataset directory layout:
//   train.txt / valid.txt / test.txt   head_key<TAB>relation_key<TAB>tail_key
//   entities.tsv                       entity_key<TAB>name<TAB>description
//   relations.json                     inverse-relation registry (registry.hpp)
//
// Every relation key in the registry is interned, including keys that only
// occur as inverses, so backward queries always have a real RelationId to
// carry. relations() therefore typically holds more rows than the number of
// relations observed in triples; n_triple_relations() reports the latter.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kermit/registry.hpp"
#include "kermit/types.hpp"

namespace kermit {

struct Entity {
  EntityId id;
  std::string raw_key;
  std::string name;         // non-empty
  std::string description;  // may be empty
};

struct Relation {
  RelationId id;
  std::string raw_key;
  std::string name;        // verbalized surface form fed to the encoder
  RelationId inverse_id;   // equals id for self-inverse relations
};

// The text a downstream encoder sees for an entity.
std::string entity_text(const Entity& entity);

// Overrides for file names inside a dataset directory. Entries may also be
// absolute paths, e.g. to point relations.json at a shared registry file.
struct DatasetFormat {
  std::string train_file = "train.txt";
  std::string valid_file = "valid.txt";
  std::string test_file = "test.txt";
  std::string entities_file = "entities.tsv";
  std::string relations_file = "relations.json";
};

class KnowledgeGraph {
 public:
  const std::vector<Entity>& entities() const { return entities_; }
  const std::vector<Relation>& relations() const { return relations_; }
  const std::vector<Triple>& triples(Split split) const;

  const Entity& entity(EntityId id) const;
  const Relation& relation(RelationId id) const;

  std::optional<EntityId> find_entity(std::string_view raw_key) const;
  std::optional<RelationId> find_relation(std::string_view raw_key) const;

  // Throwing lookups (LookupError).
  EntityId entity_id(std::string_view raw_key) const;
  RelationId relation_id(std::string_view raw_key) const;

  // Number of distinct relations that occur in at least one triple.
  std::size_t n_triple_relations() const { return n_triple_relations_; }

  const InverseRegistry& registry() const { return registry_; }
  const std::vector<std::string>& load_warnings() const { return warnings_; }

  // Assembles a graph from parts, rebuilding lookup maps and counting
  // triple relations. Used by the loader and by in-memory test fixtures.
  static KnowledgeGraph assemble(std::vector<Entity> entities,
                                 std::vector<Relation> relations,
                                 InverseRegistry registry,
                                 std::vector<Triple> train,
                                 std::vector<Triple> valid,
                                 std::vector<Triple> test,
                                 std::vector<std::string> warnings);

 private:
  std::vector<Entity> entities_;
  std::vector<Relation> relations_;
  InverseRegistry registry_;
  std::vector<Triple> train_, valid_, test_;
  std::unordered_map<std::string, EntityId> entity_ids_;
  std::unordered_map<std::string, RelationId> relation_ids_;
  std::size_t n_triple_relations_ = 0;
  std::vector<std::string> warnings_;
};

// Loads a dataset directory. Throws LoadError for missing/garbled files and
// IntegrityError (with file:line) for references to undeclared entities or
// relations. Duplicate triples within a split, and triples repeated across
// splits (train takes precedence over valid over test), are dropped with a
// logged warning so the splits are disjoint sets afterwards.
KnowledgeGraph load_dataset(const std::filesystem::path& directory,
                            const DatasetFormat& format = {});

// All known answers per (source, relation, direction), across every split.
// Backward entries are keyed by the relation id that appears in the triple,
// not the inverse id.
class FilterIndex {
 public:
  // Sorted ascending; the empty set for unseen keys.
  const std::vector<EntityId>& known(EntityId source, RelationId relation,
                                     Direction direction) const;
  bool contains(EntityId source, RelationId relation, Direction direction,
                EntityId candidate) const;

  std::size_t size() const { return index_.size(); }

  friend FilterIndex build_filter_index(const KnowledgeGraph& graph);

 private:
  static std::uint64_t pack(EntityId source, RelationId relation,
                            Direction direction);
  std::unordered_map<std::uint64_t, std::vector<EntityId>> index_;
};

FilterIndex build_filter_index(const KnowledgeGraph& graph);

}  // namespace kermit
