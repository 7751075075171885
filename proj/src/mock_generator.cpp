#include "metasynth/mock_generator.hpp"

#include <algorithm>

#include "metasynth/errors.hpp"
#include "metasynth/refinement.hpp"
#include "metasynth/text.hpp"

namespace metasynth {

namespace {

std::vector<std::string> split_lines(const std::string& body) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t end = body.find('\n', start);
    if (end == std::string::npos) end = body.size();
    lines.push_back(body.substr(start, end - start));
    if (end == body.size()) break;
    start = end + 1;
  }
  return lines;
}

std::string attr_value(const std::vector<std::pair<std::string, std::string>>& attrs,
                       std::string_view name) {
  for (const auto& [key, value] : attrs) {
    if (key == name) return value;
  }
  return "";
}

std::string first_selling_value(
    const std::vector<std::pair<std::string, std::string>>& attrs) {
  for (const auto& [key, value] : attrs) {
    if (key != "name" && key != "brand" && !trim(value).empty()) return value;
  }
  return attrs.empty() ? "" : attrs.front().second;
}

std::string ensure_period(std::string text) {
  std::string out = trim(text);
  if (!out.empty() && out.back() != '.' && out.back() != '!' && out.back() != '?') {
    out.push_back('.');
  }
  return out;
}

// Canned promotional phrasing per lexicon term, so borrowed style reads
// like copy rather than a word list.
std::string promo_phrase(const std::string& term) {
  if (term == "shop") return "Shop the range.";
  if (term == "save") return "Save today.";
  if (term == "premium") return "Premium quality.";
  if (term == "perfect") return "Perfect for gifting.";
  if (term == "discover") return "Discover more.";
  if (term == "upgrade") return "Upgrade your space.";
  if (term == "exclusive") return "Exclusive design.";
  if (term == "stylish") return "Stylish finish.";
  return capitalize_first(term) + ".";
}

/// First phrase of the named require: line in the guardrails section, e.g.
/// "require: cta = shop now | buy now" -> "shop now".
std::string required_phrase(const PromptParts& prompt, const std::string& name) {
  const std::string* rails = find_section(prompt, "guardrails");
  if (rails == nullptr) return "";
  for (const std::string& line : split_lines(*rails)) {
    const std::string prefix = "require: " + name + " = ";
    if (line.rfind(prefix, 0) != 0) continue;
    std::string matcher = line.substr(prefix.size());
    if (matcher.rfind("re:", 0) == 0) return "";
    const std::size_t bar = matcher.find(" | ");
    return trim(bar == std::string::npos ? matcher : matcher.substr(0, bar));
  }
  return "";
}

std::string cta_phrase(const PromptParts& prompt) {
  const std::string configured = required_phrase(prompt, "cta");
  return configured.empty() ? "Shop now." : ensure_period(capitalize_first(configured));
}

std::string last_token(const std::string& text) {
  const std::vector<std::string> tokens = tokenize(text);
  return tokens.empty() ? "" : tokens.back();
}

void erase_term(std::string& text, const std::string& term) {
  std::size_t pos;
  while ((pos = find_ci(text, term)) != std::string::npos) {
    text.erase(pos, term.size());
  }
  // Collapse whitespace runs left behind by the deletion.
  std::string out;
  bool in_space = false;
  for (char c : text) {
    if (c == ' ') {
      if (!in_space) out.push_back(c);
      in_space = true;
    } else {
      out.push_back(c);
      in_space = false;
    }
  }
  text = trim(out);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_page_section(const std::string& body) {
  std::vector<std::pair<std::string, std::string>> attrs;
  for (const std::string& line : split_lines(body)) {
    const std::size_t sep = line.find(": ");
    if (sep == std::string::npos) continue;
    attrs.emplace_back(line.substr(0, sep), line.substr(sep + 2));
  }
  return attrs;
}

std::string MockGeneratorClient::send(const PromptParts& prompt) {
  ++calls_;
  const std::string* task = find_section(prompt, "task");
  if (task == nullptr) {
    throw Error(Errc::invalid_argument, "mock generator: prompt lacks a task section");
  }
  if (find_ci(*task, "search queries") != std::string::npos) {
    return expand(prompt);
  }
  if (find_section(prompt, "previous") != nullptr &&
      find_section(prompt, "feedback") != nullptr) {
    return apply_feedback(prompt);
  }
  return generate(prompt);
}

std::string MockGeneratorClient::expand(const PromptParts& prompt) const {
  const std::string* page = find_section(prompt, "page");
  if (page == nullptr) return "";
  const auto attrs = parse_page_section(*page);
  const std::string name = attr_value(attrs, "name");
  const std::string brand = attr_value(attrs, "brand");

  std::vector<std::string> queries;
  if (!brand.empty() && !name.empty()) queries.push_back(to_lower(brand + " " + name));
  if (!name.empty()) queries.push_back(to_lower(name));
  if (!brand.empty() && !last_token(name).empty()) {
    queries.push_back(to_lower(brand) + " " + last_token(name));
  }
  std::string out;
  for (const std::string& query : queries) out += query + '\n';
  return out;
}

std::string MockGeneratorClient::generate(const PromptParts& prompt) const {
  const std::string* page = find_section(prompt, "page");
  const auto attrs = page != nullptr ? parse_page_section(*page)
                                     : std::vector<std::pair<std::string, std::string>>{};
  const std::string name = attr_value(attrs, "name");
  const std::string brand = attr_value(attrs, "brand");

  std::string title = brand.empty() ? name : brand + " " + name;
  if (trim(title).empty()) title = "Product";

  std::string description = ensure_period(first_selling_value(attrs));
  if (description.empty()) description = ensure_period(title);

  // Borrow promotional style from the exemplar section: echo up to three
  // promo-lexicon terms the exemplars use.
  const std::string* exemplars = find_section(prompt, "exemplars");
  if (exemplars != nullptr && *exemplars != "none") {
    const std::vector<std::string> tokens = tokenize(*exemplars);
    int borrowed = 0;
    for (const std::string& term : default_promo_lexicon()) {
      if (borrowed >= 3) break;
      if (contains_token_phrase(tokens, term)) {
        description += " " + promo_phrase(term);
        ++borrowed;
      }
    }
  }

  description += " " + cta_phrase(prompt);
  return "TITLE: " + title + "\nDESCRIPTION: " + description;
}

std::string MockGeneratorClient::apply_feedback(const PromptParts& prompt) const {
  const std::string* previous = find_section(prompt, "previous");
  Snippet snippet = parse_snippet_completion(*previous);
  const std::string* page = find_section(prompt, "page");
  const auto attrs = page != nullptr ? parse_page_section(*page)
                                     : std::vector<std::pair<std::string, std::string>>{};

  const std::string* feedback = find_section(prompt, "feedback");
  for (std::string line : split_lines(feedback != nullptr ? *feedback : "")) {
    if (line.rfind("- ", 0) == 0) line = line.substr(2);
    const std::string directive = trim(line);
    if (directive.empty()) continue;

    if (directive.rfind("remove forbidden term ", 0) == 0) {
      const std::string term = directive.substr(22);
      erase_term(snippet.title, term);
      erase_term(snippet.description, term);
    } else if (directive == "insert a call to action") {
      snippet.description += " " + cta_phrase(prompt);
    } else if (directive.rfind("include required element ", 0) == 0) {
      const std::string element = directive.substr(25);
      const std::string phrase = required_phrase(prompt, element);
      if (!phrase.empty()) {
        snippet.description += " " + ensure_period(capitalize_first(phrase));
      }
    } else if (directive == "increase promotional strength") {
      const std::vector<std::string> tokens =
          tokenize(snippet.title + " " + snippet.description);
      for (const std::string& term : default_promo_lexicon()) {
        if (!contains_token_phrase(tokens, term)) {
          snippet.description += " " + promo_phrase(term);
          break;
        }
      }
    } else if (directive.rfind("increase relevance: mention ", 0) == 0) {
      const std::string attribute = directive.substr(28);
      const std::string value = attr_value(attrs, attribute);
      if (!value.empty()) snippet.description += " " + ensure_period(value);
    }
  }

  if (trim(snippet.title).empty()) {
    const std::string name = attr_value(attrs, "name");
    snippet.title = name.empty() ? "Product" : name;
  }
  if (trim(snippet.description).empty()) {
    snippet.description = ensure_period(first_selling_value(attrs));
    if (snippet.description.empty()) snippet.description = "Quality product.";
    snippet.description += " " + cta_phrase(prompt);
  }
  return "TITLE: " + snippet.title + "\nDESCRIPTION: " + snippet.description;
}

}  // namespace metasynth
