// Flat key=value run configuration files.
//
//   # comment
//   dataset = fixtures/toy      # trailing comments allowed
//   epochs  = 20
//
// '#' starts a comment anywhere on a line; keys and values are trimmed of
// surrounding whitespace; a value runs from the first '=' to the end of the
// line, so it may itself contain '='. A key given twice keeps the later
// value. Command-line flags override anything set here.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kermit {

class ConfigMap {
 public:
  // Parses file contents; LoadError if unreadable, ConfigError (with
  // file:line) for a non-comment line without '=' or with an empty key.
  static ConfigMap parse_file(const std::filesystem::path& path);
  static ConfigMap parse_text(const std::string& text,
                              const std::string& origin);

  bool contains(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;

  // Typed reads; ConfigError names the key on a malformed value. The
  // in-place overloads assign only when the key is present.
  std::string get_string(const std::string& key) const;  // ConfigError if absent
  void read(const std::string& key, std::string& out) const;
  void read(const std::string& key, std::filesystem::path& out) const;
  void read(const std::string& key, int& out) const;
  void read(const std::string& key, double& out) const;
  void read(const std::string& key, bool& out) const;  // true/false/1/0/yes/no
  void read(const std::string& key, std::uint64_t& out) const;

  // Keys in first-appearance order, for validation and config echo.
  const std::vector<std::string>& keys() const { return order_; }
  const std::string& origin() const { return origin_; }

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
  std::string origin_;
};

}  // namespace kermit
