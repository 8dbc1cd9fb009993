// Inverse-relation registry: the curated table mapping every relation key to
// its verbalized name and its inverse. Mechanically prefixing "reverse " onto
// a relation string produces text a sentence encoder has never seen used that
// way; this table instead stores hand-written surface forms for both
// directions, so backward queries read as natural relation mentions.
//
// File format: a JSON array of objects
//   {"raw_key": str, "name": str, "inverse_raw_key": str, "inverse_name": str}
// with one entry per relation key. Keys that exist only as inverses (their
// partner appears in triples, they do not) still get their own entry, so the
// inverse mapping is total and applying it twice is the identity. An optional
// "origin" field records where an entry's wording came from.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kermit {

struct RelationRecord {
  std::string raw_key;
  std::string name;
  std::string inverse_raw_key;
  std::string inverse_name;
  std::string origin;  // optional annotation, e.g. "authored"
};

class InverseRegistry {
 public:
  // Parses and validates a registry file. Throws LoadError if the file is
  // unreadable, RegistryError if it is structurally inconsistent.
  static InverseRegistry load(const std::filesystem::path& path);

  // Builds a registry from in-memory records, with the same validation.
  static InverseRegistry from_records(std::vector<RelationRecord> records);

  bool contains(std::string_view raw_key) const;

  // Throws LookupError for unregistered keys.
  const RelationRecord& at(std::string_view raw_key) const;
  const std::string& inverse_key(std::string_view raw_key) const;

  // (name, inverse name) surface forms for a relation key.
  std::pair<std::string, std::string> verbalize(std::string_view raw_key) const;

  // All keys in file order. Deterministic; used for interning.
  const std::vector<std::string>& keys() const { return order_; }

  std::size_t size() const { return order_.size(); }

 private:
  void validate() const;

  std::vector<std::string> order_;
  std::unordered_map<std::string, RelationRecord> entries_;
};

}  // namespace kermit
