#include "kermit/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "kermit/errors.hpp"
#include "kermit/util.hpp"

namespace kermit {

namespace {

constexpr std::uint32_t kMagic = 0x54494D4Bu;  // "KMIT" little-endian
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u8(std::string& out, std::uint8_t v) {
  out.push_back(static_cast<char>(v));
}

std::uint32_t get_u32(const std::string& bytes, std::size_t& offset) {
  if (offset + 4 > bytes.size()) throw LoadError("checkpoint truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + i]))
         << (8 * i);
  }
  offset += 4;
  return v;
}

std::uint8_t get_u8(const std::string& bytes, std::size_t& offset) {
  if (offset + 1 > bytes.size()) throw LoadError("checkpoint truncated");
  return static_cast<std::uint8_t>(bytes[offset++]);
}

void put_table(std::string& out, const Mat& table) {
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.cols(); ++c) {
      const auto bits = std::bit_cast<std::uint32_t>(
          static_cast<float>(table(r, c)));
      put_u32(out, bits);
    }
  }
}

Mat get_table(const std::string& bytes, std::size_t& offset, Eigen::Index rows,
              Eigen::Index cols) {
  Mat table(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      table(r, c) = static_cast<double>(
          std::bit_cast<float>(get_u32(bytes, offset)));
    }
  }
  return table;
}

void check_model(const EncoderModel& model, const char* tower) {
  if (model.segment_table.rows() != 3 ||
      model.segment_table.cols() != model.dim() ||
      model.position_table.cols() != model.dim()) {
    throw ContractError(std::string(tower) + " tower tables are inconsistent");
  }
}

}  // namespace

std::filesystem::path vocab_path_for(const std::filesystem::path& checkpoint) {
  return std::filesystem::path(checkpoint.string() + ".vocab.tsv");
}

void save_checkpoint(const std::filesystem::path& path,
                     const Checkpoint& checkpoint) {
  const EncoderModel& q = checkpoint.q_model;
  const EncoderModel& e = checkpoint.e_model;
  check_model(q, "query");
  check_model(e, "entity");
  if (q.dim() != e.dim() || q.vocab_size() != e.vocab_size() ||
      q.max_len() != e.max_len() || q.pooling != e.pooling) {
    throw ContractError("query and entity towers disagree in shape");
  }
  if (q.vocab_size() != static_cast<Eigen::Index>(checkpoint.vocabulary.size())) {
    throw ContractError("vocabulary size disagrees with the token table");
  }

  std::string bytes;
  put_u32(bytes, kMagic);
  put_u32(bytes, kVersion);
  put_u32(bytes, static_cast<std::uint32_t>(q.dim()));
  put_u32(bytes, static_cast<std::uint32_t>(q.vocab_size()));
  put_u32(bytes, static_cast<std::uint32_t>(q.max_len()));
  put_u8(bytes, static_cast<std::uint8_t>(q.pooling));
  put_u8(bytes, static_cast<std::uint8_t>(checkpoint.mode));
  put_u8(bytes, 0);
  put_u8(bytes, 0);
  for (const EncoderModel* tower : {&q, &e}) {
    put_table(bytes, tower->token_table);
    put_table(bytes, tower->position_table);
    put_table(bytes, tower->segment_table);
  }
  write_text_file(path, bytes);
  checkpoint.vocabulary.save(vocab_path_for(path));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const std::string bytes = read_text_file(path);
  std::size_t offset = 0;
  if (get_u32(bytes, offset) != kMagic) {
    throw LoadError(path.string() + ": not a checkpoint file (bad magic)");
  }
  const std::uint32_t version = get_u32(bytes, offset);
  if (version != kVersion) {
    throw LoadError(path.string() + ": unsupported checkpoint version " +
                    std::to_string(version));
  }
  const auto d = static_cast<Eigen::Index>(get_u32(bytes, offset));
  const auto vocab = static_cast<Eigen::Index>(get_u32(bytes, offset));
  const auto max_len = static_cast<Eigen::Index>(get_u32(bytes, offset));
  const auto pooling = static_cast<Pooling>(get_u8(bytes, offset));
  const auto mode = static_cast<SequenceMode>(get_u8(bytes, offset));
  offset += 2;  // reserved

  Checkpoint checkpoint;
  checkpoint.mode = mode;
  for (EncoderModel* tower : {&checkpoint.q_model, &checkpoint.e_model}) {
    tower->pooling = pooling;
    tower->token_table = get_table(bytes, offset, vocab, d);
    tower->position_table = get_table(bytes, offset, max_len, d);
    tower->segment_table = get_table(bytes, offset, 3, d);
  }
  if (offset != bytes.size()) {
    throw LoadError(path.string() + ": trailing bytes after tables");
  }
  checkpoint.vocabulary = Vocabulary::load(vocab_path_for(path));
  if (static_cast<Eigen::Index>(checkpoint.vocabulary.size()) != vocab) {
    throw LoadError(path.string() + ": vocabulary size disagrees with header");
  }
  return checkpoint;
}

std::string checkpoint_digest(const std::filesystem::path& path) {
  return file_digest(path);
}

}  // namespace kermit
