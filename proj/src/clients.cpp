#include "metasynth/clients.hpp"

#include "metasynth/errors.hpp"

namespace metasynth {

const std::string* find_section(const PromptParts& parts, std::string_view label) {
  for (const PromptSection& section : parts) {
    if (section.label == label) return &section.body;
  }
  return nullptr;
}

std::string render_prompt(const PromptParts& parts) {
  std::string out;
  for (const PromptSection& section : parts) {
    out += "### " + section.label + "\n" + section.body + "\n\n";
  }
  return out;
}

void enforce_search_contract(const std::vector<SearchResult>& results, int k) {
  if (static_cast<int>(results.size()) > k) {
    throw Error(Errc::invalid_argument, "search results exceed requested k");
  }
  int previous_rank = 0;
  for (const SearchResult& result : results) {
    if (result.rank <= previous_rank) {
      throw Error(Errc::invalid_argument, "search results not in strictly increasing rank order");
    }
    if (result.url.empty() || result.title.empty() || result.description.empty()) {
      throw Error(Errc::invalid_argument, "search result with empty field");
    }
    previous_rank = result.rank;
  }
}

}  // namespace metasynth
