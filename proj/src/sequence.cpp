#include "kermit/sequence.hpp"

#include "kermit/errors.hpp"

namespace kermit {

const char* to_string(SequenceMode mode) {
  switch (mode) {
    case SequenceMode::baseline: return "baseline";
    case SequenceMode::full: return "full";
    default: return "pred_only";
  }
}

SequenceMode sequence_mode_from_string(const std::string& text) {
  if (text == "baseline") return SequenceMode::baseline;
  if (text == "full") return SequenceMode::full;
  if (text == "pred_only") return SequenceMode::pred_only;
  throw ConfigError("unknown sequence mode '" + text + "'");
}

int TokenSequence::n_valid() const {
  int n = 0;
  for (const std::int8_t m : mask) n += m;
  return n;
}

void TokenSequence::validate() const {
  if (segment_ids.size() != token_ids.size() || mask.size() != token_ids.size()) {
    throw ContractError("token sequence field lengths disagree");
  }
  if (token_ids.empty() || token_ids[0] != Vocabulary::cls_id || mask[0] != 1) {
    throw ContractError("token sequence must start with a masked [CLS]");
  }
  bool padding_started = false;
  std::int8_t current_segment = 0;
  for (std::size_t i = 0; i < token_ids.size(); ++i) {
    if (mask[i] != 0 && mask[i] != 1) throw ContractError("mask must be 0/1");
    if (segment_ids[i] < 0 || segment_ids[i] > 2) {
      throw ContractError("segment id out of range");
    }
    if (mask[i] == 0) {
      padding_started = true;
      if (token_ids[i] != Vocabulary::pad_id || segment_ids[i] != 0) {
        throw ContractError("padding must be [PAD] with segment 0");
      }
    } else {
      if (padding_started) throw ContractError("mask must be a 1-prefix");
      if (token_ids[i] == Vocabulary::sep_id) {
        // A [SEP] closes its block; the next real token starts the next one.
        if (segment_ids[i] != current_segment) {
          throw ContractError("[SEP] must carry its block's segment id");
        }
        ++current_segment;
      } else if (segment_ids[i] != current_segment) {
        throw ContractError("segment ids must be constant within a block");
      }
    }
  }
}

namespace {

struct Block {
  std::vector<std::int32_t> ids;
  int trim_priority;  // lower trims first on ties
};

TokenSequence assemble(std::vector<Block> blocks, int max_len) {
  const std::size_t overhead = 1 + blocks.size();  // [CLS] + one [SEP] each
  if (max_len < static_cast<int>(overhead)) {
    throw ArgumentError("max_len " + std::to_string(max_len) +
                        " cannot hold the sequence structure (" +
                        std::to_string(overhead) + " marker tokens)");
  }
  const std::size_t budget = static_cast<std::size_t>(max_len) - overhead;

  auto total = [&] {
    std::size_t n = 0;
    for (const Block& b : blocks) n += b.ids.size();
    return n;
  };
  // Trim whole tokens from the tail of the longest block until it fits.
  while (total() > budget) {
    Block* victim = nullptr;
    for (Block& b : blocks) {
      if (b.ids.empty()) continue;
      if (victim == nullptr || b.ids.size() > victim->ids.size() ||
          (b.ids.size() == victim->ids.size() &&
           b.trim_priority < victim->trim_priority)) {
        victim = &b;
      }
    }
    victim->ids.pop_back();
  }

  TokenSequence sequence;
  sequence.token_ids.reserve(static_cast<std::size_t>(max_len));
  sequence.token_ids.push_back(Vocabulary::cls_id);
  sequence.segment_ids.push_back(0);
  sequence.mask.push_back(1);
  std::int8_t segment = 0;
  for (const Block& b : blocks) {
    for (const std::int32_t id : b.ids) {
      sequence.token_ids.push_back(id);
      sequence.segment_ids.push_back(segment);
      sequence.mask.push_back(1);
    }
    sequence.token_ids.push_back(Vocabulary::sep_id);
    sequence.segment_ids.push_back(segment);
    sequence.mask.push_back(1);
    ++segment;
  }
  while (sequence.token_ids.size() < static_cast<std::size_t>(max_len)) {
    sequence.token_ids.push_back(Vocabulary::pad_id);
    sequence.segment_ids.push_back(0);
    sequence.mask.push_back(0);
  }
  return sequence;
}

}  // namespace

TokenSequence build_query_sequence(const std::string& h_text,
                                   const std::string& r_text,
                                   const std::string& t_pred_text,
                                   SequenceMode mode,
                                   const Vocabulary& vocabulary, int max_len) {
  if (mode != SequenceMode::baseline && t_pred_text.empty()) {
    throw ArgumentError(std::string(to_string(mode)) +
                        " mode requires a predictive description");
  }
  std::vector<Block> blocks;
  if (mode == SequenceMode::pred_only) {
    blocks.push_back(Block{tokenize(t_pred_text, vocabulary), 0});
  } else {
    blocks.push_back(Block{tokenize(h_text, vocabulary), 0});
    blocks.push_back(Block{tokenize(r_text, vocabulary), 2});
    if (mode == SequenceMode::full) {
      blocks.push_back(Block{tokenize(t_pred_text, vocabulary), 1});
    }
  }
  return assemble(std::move(blocks), max_len);
}

TokenSequence build_entity_sequence(const std::string& t_text,
                                    const Vocabulary& vocabulary, int max_len) {
  std::vector<Block> blocks;
  blocks.push_back(Block{tokenize(t_text, vocabulary), 0});
  return assemble(std::move(blocks), max_len);
}

}  // namespace kermit
