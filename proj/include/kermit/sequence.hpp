// Token sequence construction for the two encoder towers.
//
// Query side, by mode:
//   baseline   [CLS] H [SEP] R [SEP]              segments 0...0 1...1
//   full       [CLS] H [SEP] R [SEP] P [SEP]      segments 0..0 1..1 2..2
//   pred_only  [CLS] P [SEP]                      segments all 0
// Entity side: [CLS] T [SEP], segments all 0. H is the source entity text,
// R the relation surface name, P the predictive description of the answer.
//
// Sequences are padded to exactly max_len; padding has mask 0 and segment 0.
// [CLS] sits in the first block; every [SEP] closes (and belongs to) its
// block. When text overflows, whole-token truncation removes from the
// longest block first - ties broken H, then P, then R - so relation text is
// the last to go and the final [SEP] always survives.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kermit/vocab.hpp"

namespace kermit {

enum class SequenceMode : std::uint8_t { baseline, full, pred_only };

const char* to_string(SequenceMode mode);
SequenceMode sequence_mode_from_string(const std::string& text);

struct TokenSequence {
  std::vector<std::int32_t> token_ids;
  std::vector<std::int8_t> segment_ids;  // 0, 1, or 2
  std::vector<std::int8_t> mask;         // 1 = real token, 0 = padding

  std::size_t length() const { return token_ids.size(); }
  int n_valid() const;  // number of mask==1 positions

  // Checks the structural invariants (lengths agree, CLS first, SEPs masked,
  // mask is a prefix, segments constant within blocks). ContractError if not.
  void validate() const;
};

// Throws ArgumentError if max_len cannot hold [CLS] plus one [SEP] per block,
// or if a mode requiring predictive text receives an empty t_pred_text.
TokenSequence build_query_sequence(const std::string& h_text,
                                   const std::string& r_text,
                                   const std::string& t_pred_text,
                                   SequenceMode mode,
                                   const Vocabulary& vocabulary, int max_len);

TokenSequence build_entity_sequence(const std::string& t_text,
                                    const Vocabulary& vocabulary, int max_len);

}  // namespace kermit
