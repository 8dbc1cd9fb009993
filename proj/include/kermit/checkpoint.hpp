// Bi-encoder checkpoint serialization.
//
// Single binary file, little-endian:
//   magic "KMIT" | version u32 | d u32 | vocab u32 | max_len u32
//   | pooling u8 | mode u8 | reserved u16
// followed by six row-major float32 tables - token, position, segment for
// the query tower, then the same for the entity tower. The vocabulary is
// saved alongside as UTF-8 token<TAB>id lines at "<path>.vocab.tsv".
#pragma once

#include <filesystem>
#include <string>

#include "kermit/encoder.hpp"
#include "kermit/vocab.hpp"

namespace kermit {

struct Checkpoint {
  EncoderModel q_model;
  EncoderModel e_model;
  Vocabulary vocabulary;
  SequenceMode mode = SequenceMode::baseline;
};

std::filesystem::path vocab_path_for(const std::filesystem::path& checkpoint);

// Throws ContractError if the towers disagree in shape, Error on I/O failure.
void save_checkpoint(const std::filesystem::path& path,
                     const Checkpoint& checkpoint);

// Throws LoadError on missing files, bad magic, or version/size mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Content digest used as the checkpoint id in metric reports.
std::string checkpoint_digest(const std::filesystem::path& path);

}  // namespace kermit
