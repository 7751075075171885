#pragma once

#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "metasynth/types.hpp"

namespace metasynth {

/// A hard prohibition. Entries starting with "re:" are case-insensitive
/// regular expressions; everything else is a case-insensitive literal.
struct HardRule {
  std::string raw;       // entry as configured, including any "re:" prefix
  bool is_regex = false;
  std::regex pattern;    // compiled, icase; unused for literals
};

/// A required element: named presence check over the concatenated snippet.
/// Either a phrase set (any phrase satisfies) or a regex pattern.
struct RequiredElement {
  std::string name;
  std::vector<std::string> phrases;
  std::optional<std::string> pattern_text;
  std::regex pattern;  // compiled when pattern_text is set
};

/// Brand guardrails: hard prohibitions H, required elements R and the
/// per-criterion acceptance thresholds alpha.
struct Guardrails {
  std::vector<HardRule> hard_prohibitions;
  std::vector<RequiredElement> required_elements;
  std::map<std::string, double> thresholds;  // keys: rel, promo, cta, brand
};

HardRule make_hard_rule(std::string_view entry);
RequiredElement make_required_element(std::string name, std::vector<std::string> phrases);
RequiredElement make_required_pattern(std::string name, std::string pattern);

/// Throws config-invalid unless thresholds cover exactly the four criteria,
/// every threshold lies in [0,1] and every H/R entry is non-empty.
void validate_guardrails(const Guardrails& rails);

Guardrails default_guardrails();

/// One hard-constraint hit: the offending term and its byte span.
struct Violation {
  std::string phrase;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Every case-insensitive match of an H entry in the text. Empty iff the
/// text carries no hard violation.
std::vector<Violation> scan_hard_constraints(std::string_view text,
                                             const Guardrails& rails);

/// Names of required elements with zero matches in the concatenated snippet.
std::vector<std::string> check_required_elements(const Snippet& snippet,
                                                 const Guardrails& rails);

}  // namespace metasynth
