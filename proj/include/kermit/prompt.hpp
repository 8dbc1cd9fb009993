// Prompt construction for predictive entity descriptions. A template is a
// plain string with three slots - {h_name}, {h_desp}, {r_name} - each of
// which must occur at least once; rendering substitutes every occurrence.
// The same template serves both query directions: backward queries pass the
// tail entity as the source and the inverse relation's surface name.
#pragma once

#include <string>

#include "kermit/kg.hpp"

namespace kermit {

struct PromptTemplate {
  std::string text;

  // Throws TemplateError naming the first missing slot.
  void validate() const;
};

// The stock template shipped with the toolkit (wording intentionally frozen,
// including its grammatical quirks, so cached generations stay comparable).
const PromptTemplate& default_prompt_template();

// Substitutes the source entity's name/description and the relation name
// into every slot. Slot markers inside substituted values are not re-scanned.
// Throws TemplateError if the template is invalid.
std::string render_prompt(const PromptTemplate& prompt_template,
                          const Entity& source,
                          const std::string& relation_name);

}  // namespace kermit
