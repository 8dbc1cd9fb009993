// Synthetic knowledge graph generator for end-to-end checks.
//
// The generated world has two entity kinds: concept entities (one per
// attribute value) and item entities. Every item carries one latent attribute
// value per relation; its description spells the item-side word for each
// value, while the matching concept's name and description use a derived
// word (the item word plus an "ish" suffix). Triples link each item to the
// concept of its value under that relation, so the triple set is a pure
// function of text the encoder gets to read, yet query and answer surfaces
// share no informative token before training.
#pragma once

#include <cstdint>
#include <filesystem>

namespace kermit {

struct SynthSummary {
  std::size_t n_concepts = 0;
  std::size_t n_items = 0;
  std::size_t n_train = 0;
  std::size_t n_valid = 0;
  std::size_t n_test = 0;
};

// Writes train/valid/test.txt, entities.tsv and relations.json into
// `out_dir` (created if needed). Identical arguments produce byte-identical
// files. Throws ArgumentError unless n_entities >= 4 and n_relations >= 1.
SynthSummary generate_synthetic_kg(std::uint64_t seed, int n_entities,
                                   int n_relations,
                                   const std::filesystem::path& out_dir);

}  // namespace kermit
