// Small string/file helpers used across modules.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace kermit {

std::string to_lower_ascii(std::string_view text);

// Split on runs of whitespace; no empty tokens.
std::vector<std::string> split_whitespace(std::string_view text);

// Split on a single delimiter, keeping empty fields. "a\t\tb" -> {a, "", b}.
std::vector<std::string> split_char(std::string_view text, char delim);

std::string join(const std::vector<std::string>& parts,
                 std::string_view separator);

// Throws LoadError naming the file when it cannot be read.
std::string read_text_file(const std::filesystem::path& path);

// Throws Error when the file cannot be written.
void write_text_file(const std::filesystem::path& path,
                     std::string_view content);

std::uint64_t fnv1a64(std::string_view bytes);

// Hex digest of a file's bytes; "absent" when the file does not exist.
std::string file_digest(const std::filesystem::path& path);

std::string hex64(std::uint64_t value);

void log_warn(const std::string& message);

}  // namespace kermit
