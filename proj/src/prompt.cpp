#include "kermit/prompt.hpp"

#include <array>
#include <string_view>

#include "kermit/errors.hpp"

namespace kermit {

namespace {

constexpr std::string_view kSlotNames[] = {"{h_name}", "{h_desp}", "{r_name}"};

constexpr const char* kDefaultTemplateText =
    "I have an entity called \"{h_name}\" with description \"{h_desp}\", and "
    "a relation called \"{r_name}\". Below are their descriptions:\n"
    "You task is to find an entity such that the relationship between "
    "\"{h_name}\" and the entity is \"{r_name}\". Generate a description of "
    "the entity. Your response should be limited in 50 words.";

}  // namespace

void PromptTemplate::validate() const {
  for (const std::string_view slot : kSlotNames) {
    if (text.find(slot) == std::string::npos) {
      throw TemplateError("prompt template is missing slot " +
                          std::string(slot));
    }
  }
}

const PromptTemplate& default_prompt_template() {
  static const PromptTemplate stock{kDefaultTemplateText};
  return stock;
}

std::string render_prompt(const PromptTemplate& prompt_template,
                          const Entity& source,
                          const std::string& relation_name) {
  prompt_template.validate();
  const std::array<std::string_view, 3> values = {source.name,
                                                  source.description,
                                                  relation_name};
  const std::string& text = prompt_template.text;
  std::string out;
  out.reserve(text.size() + source.description.size());
  std::size_t i = 0;
  while (i < text.size()) {
    bool matched = false;
    for (std::size_t slot = 0; slot < 3; ++slot) {
      const std::string_view marker = kSlotNames[slot];
      if (text.compare(i, marker.size(), marker) == 0) {
        out += values[slot];
        i += marker.size();
        matched = true;
        break;
      }
    }
    if (!matched) {
      out += text[i];
      ++i;
    }
  }
  return out;
}

}  // namespace kermit
