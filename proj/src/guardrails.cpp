#include "metasynth/guardrails.hpp"

#include "metasynth/errors.hpp"
#include "metasynth/text.hpp"

namespace metasynth {

namespace {

constexpr std::string_view kRegexPrefix = "re:";

const char* const kCriteria[] = {"rel", "promo", "cta", "brand"};

}  // namespace

HardRule make_hard_rule(std::string_view entry) {
  HardRule rule;
  rule.raw = std::string(entry);
  if (entry.substr(0, kRegexPrefix.size()) == kRegexPrefix) {
    rule.is_regex = true;
    rule.pattern = std::regex(std::string(entry.substr(kRegexPrefix.size())),
                              std::regex::icase);
  }
  return rule;
}

RequiredElement make_required_element(std::string name, std::vector<std::string> phrases) {
  RequiredElement element;
  element.name = std::move(name);
  element.phrases = std::move(phrases);
  return element;
}

RequiredElement make_required_pattern(std::string name, std::string pattern) {
  RequiredElement element;
  element.name = std::move(name);
  element.pattern = std::regex(pattern, std::regex::icase);
  element.pattern_text = std::move(pattern);
  return element;
}

void validate_guardrails(const Guardrails& rails) {
  for (const HardRule& rule : rails.hard_prohibitions) {
    if (trim(rule.raw).empty() || (rule.is_regex && rule.raw.size() <= kRegexPrefix.size())) {
      throw Error(Errc::config_invalid, "guardrails.hard_prohibitions: empty entry");
    }
  }
  for (const RequiredElement& element : rails.required_elements) {
    if (element.name.empty()) {
      throw Error(Errc::config_invalid, "guardrails.required_elements: unnamed entry");
    }
    if (!element.pattern_text.has_value() && element.phrases.empty()) {
      throw Error(Errc::config_invalid,
                  "guardrails.required_elements: " + element.name + " has no matcher");
    }
    for (const std::string& phrase : element.phrases) {
      if (trim(phrase).empty()) {
        throw Error(Errc::config_invalid,
                    "guardrails.required_elements: " + element.name + " has an empty phrase");
      }
    }
  }
  for (const char* criterion : kCriteria) {
    if (rails.thresholds.find(criterion) == rails.thresholds.end()) {
      throw Error(Errc::config_invalid,
                  std::string("guardrails.thresholds: missing criterion ") + criterion);
    }
  }
  for (const auto& [key, value] : rails.thresholds) {
    bool known = false;
    for (const char* criterion : kCriteria) {
      if (key == criterion) known = true;
    }
    if (!known) {
      throw Error(Errc::config_invalid, "guardrails.thresholds: unknown criterion " + key);
    }
    if (value < 0.0 || value > 1.0) {
      throw Error(Errc::config_invalid,
                  "guardrails.thresholds." + key + ": must lie in [0,1]");
    }
  }
}

Guardrails default_guardrails() {
  Guardrails rails;
  rails.thresholds = {{"rel", 0.5}, {"promo", 0.34}, {"cta", 1.0}, {"brand", 1.0}};
  return rails;
}

std::vector<Violation> scan_hard_constraints(std::string_view text,
                                             const Guardrails& rails) {
  std::vector<Violation> violations;
  const std::string subject(text);
  for (const HardRule& rule : rails.hard_prohibitions) {
    if (rule.is_regex) {
      auto begin = std::sregex_iterator(subject.begin(), subject.end(), rule.pattern);
      for (auto it = begin; it != std::sregex_iterator(); ++it) {
        if (it->length(0) == 0) continue;
        const auto pos = static_cast<std::size_t>(it->position(0));
        violations.push_back({to_lower(it->str(0)), pos,
                              pos + static_cast<std::size_t>(it->length(0))});
      }
    } else {
      for (std::size_t pos : find_all_ci(subject, rule.raw)) {
        violations.push_back({rule.raw, pos, pos + rule.raw.size()});
      }
    }
  }
  return violations;
}

std::vector<std::string> check_required_elements(const Snippet& snippet,
                                                 const Guardrails& rails) {
  std::vector<std::string> missing;
  if (rails.required_elements.empty()) return missing;
  const std::string combined = concat_snippet(snippet.title, snippet.description);
  for (const RequiredElement& element : rails.required_elements) {
    bool present = false;
    if (element.pattern_text.has_value()) {
      present = std::regex_search(combined, element.pattern);
    } else {
      for (const std::string& phrase : element.phrases) {
        if (find_ci(combined, phrase) != std::string::npos) {
          present = true;
          break;
        }
      }
    }
    if (!present) missing.push_back(element.name);
  }
  return missing;
}

}  // namespace metasynth
