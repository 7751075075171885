#pragma once

#include <atomic>
#include <string>
#include <vector>

#include "metasynth/clients.hpp"

namespace metasynth {

/// Deterministic generator used for offline runs and every test. It is a
/// template transducer over the structured prompt:
///
///  - expand prompts: emits "brand name", "name", "brand last-noun-of-name",
///    lowercased, one per line;
///  - initial generation: TITLE = brand + name; DESCRIPTION = first selling
///    attribute, then promotional phrases echoing promo terms found in the
///    exemplar section (style borrowing, up to three), then a CTA phrase;
///  - refinement: starts from the previous snippet and applies directives
///    mechanically (deletes forbidden terms, appends CTA / required
///    elements / promo phrases / attribute mentions).
class MockGeneratorClient final : public GeneratorClient {
 public:
  MockGeneratorClient() = default;

  std::string name() const override { return "mock"; }
  std::string send(const PromptParts& prompt) override;

  int calls() const { return calls_.load(); }

 private:
  std::string expand(const PromptParts& prompt) const;
  std::string generate(const PromptParts& prompt) const;
  std::string apply_feedback(const PromptParts& prompt) const;

  std::atomic<int> calls_{0};  // callable from parallel batch workers
};

/// Parses the "name: value" lines of a rendered page section.
std::vector<std::pair<std::string, std::string>> parse_page_section(const std::string& body);

}  // namespace metasynth
