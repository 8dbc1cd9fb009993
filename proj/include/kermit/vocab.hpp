// Whitespace/punctuation tokenizer and the interned vocabulary.
// Four reserved ids lead the table: [PAD]=0, [UNK]=1, [CLS]=2, [SEP]=3.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kermit {

// Lowercases ASCII, splits on whitespace, and splits punctuation characters
// into single-character tokens ("land-reform (x)" -> land - reform ( x )).
std::vector<std::string> tokenize_text(std::string_view text);

class Vocabulary {
 public:
  static constexpr std::int32_t pad_id = 0;
  static constexpr std::int32_t unk_id = 1;
  static constexpr std::int32_t cls_id = 2;
  static constexpr std::int32_t sep_id = 3;

  // Counts tokens over the corpus texts and keeps those with frequency >=
  // min_frequency, ordered by (frequency desc, token asc) after the four
  // reserved ids. Deterministic for identical input.
  static Vocabulary build(const std::vector<std::string>& corpus,
                          int min_frequency = 2);

  // Test/bootstrap constructor: the given tokens, in order, after the
  // reserved ids. Duplicates are an ArgumentError.
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  // Lookup with [UNK] fallback.
  std::int32_t id(std::string_view token) const;
  std::optional<std::int32_t> find(std::string_view token) const;
  const std::string& token(std::int32_t id) const;

  std::size_t size() const { return tokens_.size(); }

  // token<TAB>id lines, one per id, reserved ids included.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> ids_;
};

// tokenize_text followed by vocabulary lookup.
std::vector<std::int32_t> tokenize(std::string_view text,
                                   const Vocabulary& vocabulary);

}  // namespace kermit
