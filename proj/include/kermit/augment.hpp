// Symmetric-graph augmentation. Each triple (h, r, t) yields two queries:
// the forward task (h, r) -> t and the backward task (t, r') -> h, where r'
// is the curated inverse relation. Backward queries are first-class: they
// carry the inverse RelationId, so every downstream consumer sees natural
// relation text instead of a mechanically reversed label.
#pragma once

#include <vector>

#include "kermit/kg.hpp"
#include "kermit/registry.hpp"
#include "kermit/types.hpp"

namespace kermit {

// Maps a relation id to its inverse id via the registry. Throws LookupError
// if the relation (or its inverse) is not registered/interned.
RelationId invert_relation(const KnowledgeGraph& graph,
                           const InverseRegistry& registry,
                           RelationId relation);

// Expands a split into exactly two queries per triple, in triple order,
// forward before backward. Throws LookupError for unregistered relations.
std::vector<Query> symmetrize(const KnowledgeGraph& graph,
                              const InverseRegistry& registry, Split split);

// (name, inverse name) for a raw relation key; see InverseRegistry::verbalize.
std::pair<std::string, std::string> verbalize_relation(
    const InverseRegistry& registry, const std::string& raw_key);

}  // namespace kermit
