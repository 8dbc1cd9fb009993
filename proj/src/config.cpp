#include "kermit/config.hpp"

#include <cerrno>
#include <climits>
#include <cstdlib>

#include "kermit/errors.hpp"
#include "kermit/util.hpp"

namespace kermit {

namespace {

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

std::string location(const std::string& origin, std::size_t line) {
  return origin + ":" + std::to_string(line);
}

}  // namespace

ConfigMap ConfigMap::parse_file(const std::filesystem::path& path) {
  return parse_text(read_text_file(path), path.string());
}

ConfigMap ConfigMap::parse_text(const std::string& text,
                                const std::string& origin) {
  ConfigMap config;
  config.origin_ = origin;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    ++line_no;
    std::size_t stop = text.find('\n', start);
    if (stop == std::string::npos) stop = text.size();
    std::string line = text.substr(start, stop - start);
    start = stop + 1;

    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(location(origin, line_no) +
                        ": expected key=value, got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError(location(origin, line_no) + ": empty key");
    }
    const std::string value = trim(line.substr(eq + 1));
    if (config.values_.insert_or_assign(key, value).second) {
      config.order_.push_back(key);
    }
  }
  return config;
}

bool ConfigMap::contains(const std::string& key) const {
  return values_.find(key) != values_.end();
}

std::optional<std::string> ConfigMap::find(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string ConfigMap::get_string(const std::string& key) const {
  const auto found = find(key);
  if (!found) throw ConfigError("missing configuration key '" + key + "'");
  return *found;
}

void ConfigMap::read(const std::string& key, std::string& out) const {
  if (const auto found = find(key)) out = *found;
}

void ConfigMap::read(const std::string& key,
                     std::filesystem::path& out) const {
  if (const auto found = find(key)) out = *found;
}

void ConfigMap::read(const std::string& key, int& out) const {
  const auto found = find(key);
  if (!found) return;
  errno = 0;
  char* end = nullptr;
  const long value = std::strtol(found->c_str(), &end, 10);
  if (errno != 0 || end == found->c_str() || *end != '\0' ||
      value < INT_MIN || value > INT_MAX) {
    throw ConfigError("key '" + key + "': '" + *found +
                      "' is not an integer");
  }
  out = static_cast<int>(value);
}

void ConfigMap::read(const std::string& key, double& out) const {
  const auto found = find(key);
  if (!found) return;
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(found->c_str(), &end);
  if (errno != 0 || end == found->c_str() || *end != '\0') {
    throw ConfigError("key '" + key + "': '" + *found + "' is not a number");
  }
  out = value;
}

void ConfigMap::read(const std::string& key, bool& out) const {
  const auto found = find(key);
  if (!found) return;
  const std::string value = to_lower_ascii(*found);
  if (value == "true" || value == "1" || value == "yes") {
    out = true;
  } else if (value == "false" || value == "0" || value == "no") {
    out = false;
  } else {
    throw ConfigError("key '" + key + "': '" + *found + "' is not a boolean");
  }
}

void ConfigMap::read(const std::string& key, std::uint64_t& out) const {
  const auto found = find(key);
  if (!found) return;
  errno = 0;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(found->c_str(), &end, 10);
  if (errno != 0 || end == found->c_str() || *end != '\0' ||
      found->front() == '-') {
    throw ConfigError("key '" + key + "': '" + *found +
                      "' is not an unsigned integer");
  }
  out = static_cast<std::uint64_t>(value);
}

}  // namespace kermit
