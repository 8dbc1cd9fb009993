#include "kermit/synth.hpp"

#include <algorithm>
#include <json.hpp>
#include <string>
#include <unordered_set>
#include <vector>

#include "kermit/errors.hpp"
#include "kermit/rng.hpp"
#include "kermit/util.hpp"

namespace kermit {

namespace {

const char* kSyllables[] = {"ba", "do", "ke", "lu", "mi", "no", "pa", "re",
                            "si", "tu", "ve", "zo", "fa", "gi", "hu", "wy"};
constexpr std::size_t kNumSyllables = std::size(kSyllables);

std::string fresh_word(SplitMix64& rng,
                       std::unordered_set<std::string>& used) {
  for (;;) {
    std::string word;
    for (int s = 0; s < 3; ++s) word += kSyllables[rng.below(kNumSyllables)];
    while (used.count(word)) word += kSyllables[rng.below(kNumSyllables)];
    // Reserve the derived concept form too, so it can never collide with a
    // later item-side word.
    if (used.count(word + "ish")) continue;
    used.insert(word);
    used.insert(word + "ish");
    return word;
  }
}

}  // namespace

SynthSummary generate_synthetic_kg(std::uint64_t seed, int n_entities,
                                   int n_relations,
                                   const std::filesystem::path& out_dir) {
  if (n_entities < 4) {
    throw ArgumentError("synthetic graph needs at least 4 entities");
  }
  if (n_relations < 1) {
    throw ArgumentError("synthetic graph needs at least 1 relation");
  }
  std::filesystem::create_directories(out_dir);

  const std::size_t n = static_cast<std::size_t>(n_entities);
  const std::size_t r = static_cast<std::size_t>(n_relations);

  // Values per relation: aim for 3, never starve the item population.
  std::size_t groups = std::clamp<std::size_t>((n / 2) / r, 1, 3);
  while (groups > 1 && r * groups > n - 2) --groups;
  // Degenerate argument combinations share concept entities across relations.
  const std::size_t pool = std::min(r * groups, n - 2);
  const std::size_t items = n - pool;

  SplitMix64 rng(seed);
  std::unordered_set<std::string> used;

  std::vector<std::string> category(r);
  for (std::size_t k = 0; k < r; ++k) category[k] = fresh_word(rng, used);
  std::vector<std::string> slot_word(pool);
  for (std::size_t s = 0; s < pool; ++s) slot_word[s] = fresh_word(rng, used);

  const auto slot_of = [&](std::size_t k, std::size_t v) {
    return (k * groups + v) % pool;
  };

  // Latent attribute values, one per (item, relation).
  std::vector<std::vector<std::size_t>> value(items,
                                              std::vector<std::size_t>(r));
  for (std::size_t j = 0; j < items; ++j) {
    for (std::size_t k = 0; k < r; ++k) value[j][k] = rng.below(groups);
  }

  // entities.tsv: concepts first, then items.
  std::string entities_tsv;
  for (std::size_t s = 0; s < pool; ++s) {
    const std::string concept_word = slot_word[s] + "ish";
    entities_tsv += "c" + std::to_string(s) + "_" + concept_word + "\t" +
                    concept_word + "\ta group of " + concept_word +
                    " things\n";
  }
  for (std::size_t j = 0; j < items; ++j) {
    std::string words;
    for (std::size_t k = 0; k < r; ++k) {
      words += slot_word[slot_of(k, value[j][k])] + " ";
    }
    entities_tsv += "i" + std::to_string(j) + "\titem" + std::to_string(j) +
                    "\ta " + words + "thing\n";
  }
  write_text_file(out_dir / "entities.tsv", entities_tsv);

  // relations.json: every key, including the inverse-only ones.
  nlohmann::ordered_json registry = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < r; ++k) {
    const std::string raw = "rel_" + category[k];
    const std::string name = "has " + category[k];
    const std::string inverse_raw = raw + "_inv";
    const std::string inverse_name = "is " + category[k] + " of";
    registry.push_back({{"raw_key", raw},
                        {"name", name},
                        {"inverse_raw_key", inverse_raw},
                        {"inverse_name", inverse_name},
                        {"origin", "synthetic"}});
    registry.push_back({{"raw_key", inverse_raw},
                        {"name", inverse_name},
                        {"inverse_raw_key", raw},
                        {"inverse_name", name},
                        {"origin", "synthetic"}});
  }
  write_text_file(out_dir / "relations.json", registry.dump(2) + "\n");

  // One triple per (item, relation), shuffled, split 80/10/10.
  std::vector<std::string> lines;
  lines.reserve(items * r);
  for (std::size_t j = 0; j < items; ++j) {
    for (std::size_t k = 0; k < r; ++k) {
      const std::size_t s = slot_of(k, value[j][k]);
      lines.push_back("i" + std::to_string(j) + "\trel_" + category[k] +
                      "\tc" + std::to_string(s) + "_" + slot_word[s] + "ish");
    }
  }
  rng.shuffle(lines);

  const std::size_t n_valid = lines.size() / 10;
  const std::size_t n_test = lines.size() / 10;
  const std::size_t n_train = lines.size() - n_valid - n_test;
  const auto write_split = [&](const char* file, std::size_t begin,
                               std::size_t end) {
    std::string text;
    for (std::size_t i = begin; i < end; ++i) text += lines[i] + "\n";
    write_text_file(out_dir / file, text);
  };
  write_split("train.txt", 0, n_train);
  write_split("valid.txt", n_train, n_train + n_valid);
  write_split("test.txt", n_train + n_valid, lines.size());

  SynthSummary summary;
  summary.n_concepts = pool;
  summary.n_items = items;
  summary.n_train = n_train;
  summary.n_valid = n_valid;
  summary.n_test = n_test;
  return summary;
}

}  // namespace kermit
