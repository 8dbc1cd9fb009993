#include "kermit/vocab.hpp"

#include <algorithm>
#include <cctype>

#include "kermit/errors.hpp"
#include "kermit/util.hpp"

namespace kermit {

namespace {

const char* kReserved[] = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};

bool is_punct(unsigned char c) { return std::ispunct(c) != 0; }

}  // namespace

std::vector<std::string> tokenize_text(std::string_view text) {
  const std::string lowered = to_lower_ascii(text);
  std::vector<std::string> out;
  std::string word;
  const auto flush = [&] {
    if (!word.empty()) {
      out.push_back(word);
      word.clear();
    }
  };
  for (const char c : lowered) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      flush();
    } else if (is_punct(uc)) {
      flush();
      out.emplace_back(1, c);
    } else {
      word += c;
    }
  }
  flush();
  return out;
}

Vocabulary Vocabulary::build(const std::vector<std::string>& corpus,
                             int min_frequency) {
  if (min_frequency < 1) throw ArgumentError("min_frequency must be >= 1");
  std::unordered_map<std::string, std::int64_t> counts;
  for (const std::string& text : corpus) {
    for (std::string& token : tokenize_text(text)) {
      ++counts[std::move(token)];
    }
  }
  std::vector<std::pair<std::string, std::int64_t>> kept;
  kept.reserve(counts.size());
  for (auto& [token, count] : counts) {
    if (count >= min_frequency) kept.emplace_back(token, count);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> tokens;
  tokens.reserve(kept.size());
  for (auto& [token, count] : kept) tokens.push_back(std::move(token));
  return from_tokens(tokens);
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  Vocabulary vocabulary;
  for (const char* reserved : kReserved) {
    vocabulary.ids_.emplace(reserved,
                            static_cast<std::int32_t>(vocabulary.tokens_.size()));
    vocabulary.tokens_.emplace_back(reserved);
  }
  for (const std::string& token : tokens) {
    const auto id = static_cast<std::int32_t>(vocabulary.tokens_.size());
    if (!vocabulary.ids_.emplace(token, id).second) {
      throw ArgumentError("duplicate vocabulary token '" + token + "'");
    }
    vocabulary.tokens_.push_back(token);
  }
  return vocabulary;
}

std::int32_t Vocabulary::id(std::string_view token) const {
  const auto it = ids_.find(std::string(token));
  return it == ids_.end() ? unk_id : it->second;
}

std::optional<std::int32_t> Vocabulary::find(std::string_view token) const {
  const auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::token(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw LookupError("token id out of range: " + std::to_string(id));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::string text;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    text += tokens_[i] + "\t" + std::to_string(i) + "\n";
  }
  write_text_file(path, text);
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<std::string> tokens;
  std::size_t line_no = 0;
  for (const std::string& line : split_char(text, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_char(line, '\t');
    if (fields.size() != 2 ||
        fields[1] != std::to_string(tokens.size())) {
      throw LoadError(path.string() + ":" + std::to_string(line_no) +
                      ": expected token<TAB>" + std::to_string(tokens.size()));
    }
    tokens.push_back(fields[0]);
  }
  for (std::size_t i = 0; i < std::size(kReserved); ++i) {
    if (tokens.size() <= i || tokens[i] != kReserved[i]) {
      throw LoadError(path.string() + ": reserved token table is damaged");
    }
  }
  return from_tokens({tokens.begin() + std::ssize(kReserved), tokens.end()});
}

std::vector<std::int32_t> tokenize(std::string_view text,
                                   const Vocabulary& vocabulary) {
  std::vector<std::int32_t> ids;
  for (const std::string& token : tokenize_text(text)) {
    ids.push_back(vocabulary.id(token));
  }
  return ids;
}

}  // namespace kermit
