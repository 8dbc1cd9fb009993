#include <doctest.h>

#include <string>
#include <vector>

#include "kermit/augment.hpp"
#include "kermit/errors.hpp"
#include "kermit/kg.hpp"
#include "kermit/rng.hpp"
#include "test_support.hpp"

using namespace kermit;

namespace {

// A small in-memory graph with one relation pair and one self-inverse,
// parameterized by a seeded triple pattern.
KnowledgeGraph random_graph(std::uint64_t seed, int n_entities, int n_triples) {
  std::vector<Entity> entities;
  for (int i = 0; i < n_entities; ++i) {
    entities.push_back({i, "e" + std::to_string(i), "entity " + std::to_string(i),
                        "description " + std::to_string(i)});
  }
  const InverseRegistry registry = InverseRegistry::from_records({
      {"parent_of", "is parent of", "child_of", "is child of", ""},
      {"child_of", "is child of", "parent_of", "is parent of", ""},
      {"twin_of", "is twin of", "twin_of", "is twin of", ""},
  });
  std::vector<Relation> relations = {
      {0, "parent_of", "is parent of", 1},
      {1, "child_of", "is child of", 0},
      {2, "twin_of", "is twin of", 2},
  };
  SplitMix64 rng(seed);
  std::vector<Triple> train;
  for (int t = 0; t < n_triples; ++t) {
    const auto head = static_cast<EntityId>(rng.below(n_entities));
    auto tail = static_cast<EntityId>(rng.below(n_entities));
    if (tail == head) tail = (tail + 1) % n_entities;
    train.push_back({head, static_cast<RelationId>(rng.below(3)), tail});
  }
  return KnowledgeGraph::assemble(std::move(entities), std::move(relations),
                                  registry, std::move(train), {}, {}, {});
}

}  // namespace

TEST_SUITE("augment") {

TEST_CASE("invert_relation follows the registry both ways") {
  const KnowledgeGraph g = kermit::test::load_toy5();
  const RelationId orbits = g.relation_id("orbits");
  const RelationId orbited_by = g.relation_id("orbited_by");
  const RelationId near = g.relation_id("near");
  CHECK(invert_relation(g, g.registry(), orbits) == orbited_by);
  CHECK(invert_relation(g, g.registry(), orbited_by) == orbits);
  CHECK(invert_relation(g, g.registry(), near) == near);
  CHECK(invert_relation(g, g.registry(),
                        invert_relation(g, g.registry(), orbits)) == orbits);
}

TEST_CASE("symmetrize emits forward then backward per triple, in order") {
  const KnowledgeGraph g = kermit::test::load_toy5();
  const std::vector<Query> queries =
      symmetrize(g, g.registry(), Split::train);
  REQUIRE(queries.size() == 6);

  const EntityId earth = g.entity_id("e_earth");
  const EntityId sun = g.entity_id("e_sun");
  const RelationId orbits = g.relation_id("orbits");
  const RelationId orbited_by = g.relation_id("orbited_by");

  // First train triple is (earth, orbits, sun).
  CHECK(queries[0] == Query{earth, orbits, Direction::forward, sun});
  CHECK(queries[1] == Query{sun, orbited_by, Direction::backward, earth});

  for (std::size_t i = 0; i < queries.size(); i += 2) {
    const Triple& triple = g.triples(Split::train)[i / 2];
    CHECK(queries[i].source == triple.head);
    CHECK(queries[i].answer == triple.tail);
    CHECK(queries[i].direction == Direction::forward);
    CHECK(queries[i + 1].source == triple.tail);
    CHECK(queries[i + 1].answer == triple.head);
    CHECK(queries[i + 1].direction == Direction::backward);
    CHECK(queries[i + 1].relation ==
          g.relation(queries[i].relation).inverse_id);
  }
}

TEST_CASE("self-inverse relations keep their own id backward") {
  const KnowledgeGraph g = kermit::test::load_toy5();
  const std::vector<Query> queries = symmetrize(g, g.registry(), Split::test);
  REQUIRE(queries.size() == 2);
  CHECK(queries[0].relation == g.relation_id("near"));
  CHECK(queries[1].relation == g.relation_id("near"));
  CHECK(queries[1].source == queries[0].answer);
}

TEST_CASE("an empty split symmetrizes to no queries") {
  const KnowledgeGraph g = random_graph(7, 4, 0);
  CHECK(symmetrize(g, g.registry(), Split::valid).empty());
}

TEST_CASE("every triple doubles on random graphs") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const KnowledgeGraph g = random_graph(seed, 3 + seed % 6, 1 + seed % 9);
    const std::vector<Query> queries =
        symmetrize(g, g.registry(), Split::train);
    const std::vector<Triple>& triples = g.triples(Split::train);
    REQUIRE(queries.size() == 2 * triples.size());
    for (std::size_t t = 0; t < triples.size(); ++t) {
      CHECK(queries[2 * t] == Query{triples[t].head, triples[t].relation,
                                    Direction::forward, triples[t].tail});
      const RelationId inverse = g.relation(triples[t].relation).inverse_id;
      CHECK(queries[2 * t + 1] == Query{triples[t].tail, inverse,
                                        Direction::backward, triples[t].head});
    }
  }
}

TEST_CASE("verbalize_relation surfaces both directions") {
  const KnowledgeGraph g = kermit::test::load_toy5();
  const auto [name, inverse_name] =
      verbalize_relation(g.registry(), "orbits");
  CHECK(name == "orbits");
  CHECK(inverse_name == "is orbited by");
}

}  // TEST_SUITE("augment")
