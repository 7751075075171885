#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace metasynth {

/// One search result: landing URL, displayed snippet, rank (1 = top).
struct SearchResult {
  std::string url;
  std::string title;
  std::string description;
  int rank = 1;
};

/// Black-box search contract: top-K results in strictly increasing rank
/// order starting at 1, at most K of them.
class SearchClient {
 public:
  virtual ~SearchClient() = default;
  virtual std::string name() const = 0;
  virtual int max_k() const = 0;
  virtual std::vector<SearchResult> search(const std::string& query, int k) = 0;
};

/// One labeled prompt section. Prompts are ordered section lists so that
/// deterministic clients can read them structurally and HTTP clients can
/// render them to text.
struct PromptSection {
  std::string label;
  std::string body;
};

using PromptParts = std::vector<PromptSection>;

const std::string* find_section(const PromptParts& parts, std::string_view label);

/// Plain-text rendering used by HTTP-backed generators.
std::string render_prompt(const PromptParts& parts);

/// Text-completion contract shared by query expansion and snippet
/// generation. Implementations must be deterministic for deterministic
/// inputs (temperature 0 for remote models).
class GeneratorClient {
 public:
  virtual ~GeneratorClient() = default;
  virtual std::string name() const = 0;
  virtual std::string send(const PromptParts& prompt) = 0;
};

/// Throws invalid-argument when results violate the contract (rank order,
/// more than k items, empty fields).
void enforce_search_contract(const std::vector<SearchResult>& results, int k);

}  // namespace metasynth
