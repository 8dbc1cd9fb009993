// Predictive-description generation and its append-only cache.
//
// For a query (source, relation, direction) the generation service is asked
// to describe the unknown answer entity. Responses are stored verbatim in a
// JSONL cache keyed by the query; reruns are pure cache reads, so a pipeline
// interrupted mid-generation resumes with exactly the remaining queries.
#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kermit/kg.hpp"
#include "kermit/prompt.hpp"
#include "kermit/types.hpp"

namespace kermit {

enum class Provenance : std::uint8_t { service, stub, cache };

const char* to_string(Provenance provenance);
Provenance provenance_from_string(const std::string& text);

struct QueryKey {
  std::string source_key;
  std::string relation_key;
  Direction direction = Direction::forward;

  // Stable single-string form, used in error messages and map keys.
  std::string packed() const;

  bool operator==(const QueryKey&) const = default;
};

QueryKey make_query_key(const KnowledgeGraph& graph, const Query& query);

struct PredictiveDescription {
  QueryKey key;
  std::string text;
  Provenance provenance = Provenance::service;
};

// Abstract generation client. send() is the wire call; generate() exists so
// offline implementations can answer from the query itself (the prompt is
// not reliably parseable once entity text contains quotes).
class GenerationClient {
 public:
  virtual ~GenerationClient() = default;
  virtual std::string send(const std::string& prompt) = 0;
  virtual std::string generate(const std::string& prompt, const Query& query) {
    (void)query;
    return send(prompt);
  }
  virtual Provenance kind() const { return Provenance::service; }
  // Failed calls are retried this many times before giving up.
  virtual int retries() const { return 2; }
};

// Deterministic offline description: names the relation the answer must
// satisfy and echoes up to the first 20 whitespace tokens of the source
// entity's description.
std::string stub_describe(const Query& query, const KnowledgeGraph& graph);

class StubClient final : public GenerationClient {
 public:
  explicit StubClient(const KnowledgeGraph& graph) : graph_(graph) {}
  std::string send(const std::string&) override;
  std::string generate(const std::string&, const Query& query) override {
    return stub_describe(query, graph_);
  }
  Provenance kind() const override { return Provenance::stub; }

 private:
  const KnowledgeGraph& graph_;
};

// Append-only JSONL cache. Each line is
//   {"key": {"source": .., "relation": .., "direction": "fwd"|"bwd"},
//    "text": .., "provenance": ..}
// Later lines win on duplicate keys, so an interrupted writer can only lose
// its torn final line, never corrupt earlier entries.
class DescriptionCache {
 public:
  // Loads an existing file if present (unparseable lines are skipped with a
  // warning) and keeps the path for appends.
  static DescriptionCache open(const std::filesystem::path& path);

  const PredictiveDescription* find(const QueryKey& key) const;

  // Inserts (or supersedes) an entry, appending one line and flushing.
  void put(const PredictiveDescription& description);

  std::size_t size() const { return entries_.size(); }
  const std::filesystem::path& file() const { return path_; }

 private:
  std::filesystem::path path_;
  std::unordered_map<std::string, PredictiveDescription> entries_;
};

// Returns the cached description for the query, or renders the prompt and
// asks the client, retrying per its policy. Fresh results are written to the
// cache with the client's provenance before returning; cache hits come back
// tagged Provenance::cache without any client call. Throws GenerationError
// (carrying the query key) once retries are exhausted.
PredictiveDescription generate_description(GenerationClient& client,
                                           DescriptionCache& cache,
                                           const PromptTemplate& prompt_template,
                                           const Query& query,
                                           const KnowledgeGraph& graph);

struct DescribeReport {
  std::size_t fresh = 0;
  std::size_t cached = 0;
};

// Runs generation for a whole query list. Cache writes happen in query order
// regardless of max_in_flight, so rerunning over the same inputs leaves the
// cache file byte-identical. On failure the error propagates after all
// earlier results are flushed.
DescribeReport run_describe_stage(GenerationClient& client,
                                  DescriptionCache& cache,
                                  const PromptTemplate& prompt_template,
                                  const std::vector<Query>& queries,
                                  const KnowledgeGraph& graph,
                                  int max_in_flight = 4);

}  // namespace kermit
