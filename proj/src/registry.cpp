#include "kermit/registry.hpp"

#include <json.hpp>

#include "kermit/errors.hpp"
#include "kermit/util.hpp"

namespace kermit {

namespace {

std::string require_string(const nlohmann::json& object, const char* field,
                           std::size_t index) {
  if (!object.contains(field) || !object[field].is_string()) {
    throw RegistryError("registry entry " + std::to_string(index) +
                        ": missing string field '" + field + "'");
  }
  return object[field].get<std::string>();
}

}  // namespace

InverseRegistry InverseRegistry::load(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError("registry file " + path.string() + ": " + e.what());
  }
  if (!doc.is_array()) {
    throw RegistryError("registry file " + path.string() +
                        ": expected a JSON array");
  }
  std::vector<RelationRecord> records;
  records.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& object = doc[i];
    if (!object.is_object()) {
      throw RegistryError("registry entry " + std::to_string(i) +
                          ": expected an object");
    }
    RelationRecord record;
    record.raw_key = require_string(object, "raw_key", i);
    record.name = require_string(object, "name", i);
    record.inverse_raw_key = require_string(object, "inverse_raw_key", i);
    record.inverse_name = require_string(object, "inverse_name", i);
    if (object.contains("origin") && object["origin"].is_string()) {
      record.origin = object["origin"].get<std::string>();
    }
    records.push_back(std::move(record));
  }
  return from_records(std::move(records));
}

InverseRegistry InverseRegistry::from_records(
    std::vector<RelationRecord> records) {
  InverseRegistry registry;
  for (auto& record : records) {
    if (registry.entries_.count(record.raw_key)) {
      throw RegistryError("duplicate registry entry for '" + record.raw_key +
                          "'");
    }
    registry.order_.push_back(record.raw_key);
    registry.entries_.emplace(record.raw_key, std::move(record));
  }
  registry.validate();
  return registry;
}

void InverseRegistry::validate() const {
  for (const auto& key : order_) {
    const RelationRecord& record = entries_.at(key);
    if (record.name.empty()) {
      throw RegistryError("registry entry '" + key + "': empty name");
    }
    const auto partner = entries_.find(record.inverse_raw_key);
    if (partner == entries_.end()) {
      throw RegistryError("registry entry '" + key + "': inverse key '" +
                          record.inverse_raw_key + "' has no entry");
    }
    if (partner->second.inverse_raw_key != record.raw_key) {
      throw RegistryError(
          "registry involution violated: '" + key + "' -> '" +
          record.inverse_raw_key + "' -> '" + partner->second.inverse_raw_key +
          "'");
    }
    if (partner->second.name != record.inverse_name) {
      throw RegistryError("registry entry '" + key + "': inverse_name '" +
                          record.inverse_name + "' disagrees with entry '" +
                          record.inverse_raw_key + "' name '" +
                          partner->second.name + "'");
    }
  }
}

bool InverseRegistry::contains(std::string_view raw_key) const {
  return entries_.count(std::string(raw_key)) > 0;
}

const RelationRecord& InverseRegistry::at(std::string_view raw_key) const {
  const auto it = entries_.find(std::string(raw_key));
  if (it == entries_.end()) {
    throw LookupError("relation '" + std::string(raw_key) +
                      "' is not registered");
  }
  return it->second;
}

const std::string& InverseRegistry::inverse_key(
    std::string_view raw_key) const {
  return at(raw_key).inverse_raw_key;
}

std::pair<std::string, std::string> InverseRegistry::verbalize(
    std::string_view raw_key) const {
  const RelationRecord& record = at(raw_key);
  return {record.name, record.inverse_name};
}

}  // namespace kermit
