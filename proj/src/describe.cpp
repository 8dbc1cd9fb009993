#include "kermit/describe.hpp"

#include <fstream>
#include <future>
#include <json.hpp>

#include "kermit/errors.hpp"
#include "kermit/util.hpp"

namespace kermit {

const char* to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::service: return "service";
    case Provenance::stub: return "stub";
    default: return "cache";
  }
}

Provenance provenance_from_string(const std::string& text) {
  if (text == "service") return Provenance::service;
  if (text == "stub") return Provenance::stub;
  if (text == "cache") return Provenance::cache;
  throw DataError("unknown provenance '" + text + "'");
}

std::string QueryKey::packed() const {
  return source_key + "\x1f" + relation_key + "\x1f" + to_string(direction);
}

QueryKey make_query_key(const KnowledgeGraph& graph, const Query& query) {
  QueryKey key;
  key.source_key = graph.entity(query.source).raw_key;
  key.relation_key = graph.relation(query.relation).raw_key;
  key.direction = query.direction;
  return key;
}

std::string stub_describe(const Query& query, const KnowledgeGraph& graph) {
  const Entity& source = graph.entity(query.source);
  const Relation& relation = graph.relation(query.relation);
  std::string text = "Entity such that the relationship between \"" +
                     source.name + "\" and the entity is \"" + relation.name +
                     "\".";
  std::vector<std::string> tokens = split_whitespace(source.description);
  if (tokens.size() > 20) tokens.resize(20);
  if (!tokens.empty()) text += " " + join(tokens, " ");
  return text;
}

std::string StubClient::send(const std::string&) {
  throw Error("stub client has no wire transport");
}

DescriptionCache DescriptionCache::open(const std::filesystem::path& path) {
  DescriptionCache cache;
  cache.path_ = path;
  std::error_code ec;
  if (!std::filesystem::exists(path, ec) || ec) return cache;

  const std::string text = read_text_file(path);
  std::size_t line_no = 0;
  std::size_t skipped = 0;
  for (const std::string& line : split_char(text, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const nlohmann::json doc = nlohmann::json::parse(line);
      PredictiveDescription entry;
      const auto& key = doc.at("key");
      entry.key.source_key = key.at("source").get<std::string>();
      entry.key.relation_key = key.at("relation").get<std::string>();
      const std::string direction = key.at("direction").get<std::string>();
      if (direction == "fwd") {
        entry.key.direction = Direction::forward;
      } else if (direction == "bwd") {
        entry.key.direction = Direction::backward;
      } else {
        throw DataError("bad direction");
      }
      entry.text = doc.at("text").get<std::string>();
      entry.provenance =
          provenance_from_string(doc.at("provenance").get<std::string>());
      cache.entries_[entry.key.packed()] = std::move(entry);  // last one wins
    } catch (const std::exception&) {
      ++skipped;
    }
  }
  if (skipped > 0) {
    log_warn(path.string() + ": skipped " + std::to_string(skipped) +
             " unparseable cache line(s)");
  }
  return cache;
}

const PredictiveDescription* DescriptionCache::find(const QueryKey& key) const {
  const auto it = entries_.find(key.packed());
  return it == entries_.end() ? nullptr : &it->second;
}

void DescriptionCache::put(const PredictiveDescription& description) {
  if (path_.empty()) throw ContractError("description cache has no file path");
  nlohmann::ordered_json line = {
      {"key",
       {{"source", description.key.source_key},
        {"relation", description.key.relation_key},
        {"direction", to_string(description.key.direction)}}},
      {"text", description.text},
      {"provenance", to_string(description.provenance)}};
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw Error("cannot append to cache: " + path_.string());
  out << line.dump() << "\n";
  out.flush();
  if (!out) throw Error("cannot write cache: " + path_.string());
  entries_[description.key.packed()] = description;
}

namespace {

// One generation attempt cycle for a cache miss; no cache interaction.
PredictiveDescription generate_fresh(GenerationClient& client,
                                     const PromptTemplate& prompt_template,
                                     const Query& query,
                                     const KnowledgeGraph& graph,
                                     const QueryKey& key) {
  const Entity& source = graph.entity(query.source);
  const std::string& relation_name = graph.relation(query.relation).name;
  const std::string prompt = render_prompt(prompt_template, source, relation_name);

  const int attempts = client.retries() + 1;
  std::string last_error = "no attempts made";
  for (int attempt = 0; attempt < attempts; ++attempt) {
    try {
      PredictiveDescription fresh;
      fresh.key = key;
      fresh.text = client.generate(prompt, query);
      fresh.provenance = client.kind();
      return fresh;
    } catch (const std::exception& e) {
      last_error = e.what();
    }
  }
  throw GenerationError("generation failed for query " + key.packed() +
                            " after " + std::to_string(attempts) +
                            " attempt(s): " + last_error,
                        key.packed());
}

}  // namespace

PredictiveDescription generate_description(GenerationClient& client,
                                           DescriptionCache& cache,
                                           const PromptTemplate& prompt_template,
                                           const Query& query,
                                           const KnowledgeGraph& graph) {
  const QueryKey key = make_query_key(graph, query);
  if (const PredictiveDescription* hit = cache.find(key)) {
    PredictiveDescription result = *hit;
    result.provenance = Provenance::cache;
    return result;
  }
  PredictiveDescription fresh =
      generate_fresh(client, prompt_template, query, graph, key);
  cache.put(fresh);
  return fresh;
}

DescribeReport run_describe_stage(GenerationClient& client,
                                  DescriptionCache& cache,
                                  const PromptTemplate& prompt_template,
                                  const std::vector<Query>& queries,
                                  const KnowledgeGraph& graph,
                                  int max_in_flight) {
  if (max_in_flight < 1) throw ArgumentError("max_in_flight must be >= 1");
  DescribeReport report;

  std::vector<std::pair<std::size_t, QueryKey>> misses;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    QueryKey key = make_query_key(graph, queries[i]);
    if (cache.find(key)) {
      ++report.cached;
    } else {
      misses.emplace_back(i, std::move(key));
    }
  }

  // Window of at most max_in_flight concurrent generations; results are
  // committed to the cache strictly in query order.
  for (std::size_t begin = 0; begin < misses.size();
       begin += static_cast<std::size_t>(max_in_flight)) {
    const std::size_t end =
        std::min(misses.size(), begin + static_cast<std::size_t>(max_in_flight));
    std::vector<std::future<PredictiveDescription>> window;
    window.reserve(end - begin);
    for (std::size_t m = begin; m < end; ++m) {
      const auto& [index, key] = misses[m];
      if (end - begin == 1) {
        // Degenerate window: run inline, no thread round-trip.
        std::promise<PredictiveDescription> promise;
        try {
          promise.set_value(generate_fresh(client, prompt_template,
                                           queries[index], graph, key));
        } catch (...) {
          promise.set_exception(std::current_exception());
        }
        window.push_back(promise.get_future());
      } else {
        window.push_back(std::async(std::launch::async, [&, index, m] {
          return generate_fresh(client, prompt_template, queries[index], graph,
                                misses[m].second);
        }));
      }
    }
    for (auto& pending : window) {
      PredictiveDescription fresh = pending.get();  // rethrows the first failure
      cache.put(fresh);
      ++report.fresh;
    }
  }
  return report;
}

}  // namespace kermit
