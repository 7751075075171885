#include "metasynth/text.hpp"

#include <algorithm>
#include <cctype>

#include "metasynth/errors.hpp"

namespace metasynth {

namespace {

char lower_char(unsigned char c) { return static_cast<char>(std::tolower(c)); }

bool is_alnum(unsigned char c) { return std::isalnum(c) != 0; }

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

}  // namespace

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return lower_char(c); });
  return out;
}

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && is_space(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && is_space(static_cast<unsigned char>(text[end - 1]))) --end;
  return std::string(text.substr(begin, end - begin));
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    if (is_alnum(static_cast<unsigned char>(ch))) {
      current.push_back(lower_char(static_cast<unsigned char>(ch)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

bool contains_token_phrase(const std::vector<std::string>& tokens,
                           std::string_view phrase) {
  const std::vector<std::string> needle = tokenize(phrase);
  if (needle.empty() || needle.size() > tokens.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= tokens.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), tokens.begin() + i)) return true;
  }
  return false;
}

std::size_t find_ci(std::string_view haystack, std::string_view needle,
                    std::size_t from) {
  if (needle.empty() || needle.size() > haystack.size()) return std::string::npos;
  for (std::size_t i = from; i + needle.size() <= haystack.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < needle.size(); ++j) {
      if (lower_char(static_cast<unsigned char>(haystack[i + j])) !=
          lower_char(static_cast<unsigned char>(needle[j]))) {
        match = false;
        break;
      }
    }
    if (match) return i;
  }
  return std::string::npos;
}

std::vector<std::size_t> find_all_ci(std::string_view haystack,
                                     std::string_view needle) {
  std::vector<std::size_t> hits;
  std::size_t pos = 0;
  while (true) {
    pos = find_ci(haystack, needle, pos);
    if (pos == std::string::npos) break;
    hits.push_back(pos);
    pos += needle.size();
  }
  return hits;
}

bool has_control_chars(std::string_view text) {
  return std::any_of(text.begin(), text.end(), [](char c) {
    return static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) == 0x7f;
  });
}

std::string strip_control_chars(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) == 0x7f) {
      out.push_back(' ');
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string sanitize_snippet_field(std::string_view text) {
  std::string out(text);
  // " || " -> " | " shrinks the string, so this always terminates.
  std::size_t pos;
  while ((pos = out.find(" || ")) != std::string::npos) {
    out.replace(pos, 4, " | ");
  }
  // A field ending in " ||" would fuse with the separator's leading space
  // into a phantom " || ", so shrink that run as well.
  if (out.size() >= 3 && out.compare(out.size() - 3, 3, " ||") == 0) {
    out.erase(out.size() - 1);
  }
  return out;
}

std::string concat_snippet(std::string_view title, std::string_view description) {
  if (title.empty() || description.empty()) {
    throw Error(Errc::invalid_argument, "concat_snippet: empty title or description");
  }
  return sanitize_snippet_field(title) + " || " + sanitize_snippet_field(description);
}

std::pair<std::string, std::string> split_snippet(std::string_view combined) {
  const std::size_t pos = combined.find(" || ");
  if (pos == std::string::npos) {
    throw Error(Errc::invalid_argument, "split_snippet: separator not found");
  }
  return {std::string(combined.substr(0, pos)), std::string(combined.substr(pos + 4))};
}

std::string canonicalize_url(std::string_view url) {
  std::string out;
  out.reserve(url.size());
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    out = std::string(url);
  } else {
    for (std::size_t i = 0; i < scheme_end + 3; ++i) {
      out.push_back(lower_char(static_cast<unsigned char>(url[i])));
    }
    std::size_t host_end = url.find('/', scheme_end + 3);
    if (host_end == std::string_view::npos) host_end = url.size();
    for (std::size_t i = scheme_end + 3; i < host_end; ++i) {
      out.push_back(lower_char(static_cast<unsigned char>(url[i])));
    }
    out.append(url.substr(host_end));
  }
  while (!out.empty() && out.back() == '/') out.pop_back();
  return out;
}

bool is_valid_url(std::string_view url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos || scheme_end == 0) return false;
  for (std::size_t i = 0; i < scheme_end; ++i) {
    if (!std::isalpha(static_cast<unsigned char>(url[i]))) return false;
  }
  std::size_t host_end = url.find('/', scheme_end + 3);
  if (host_end == std::string_view::npos) host_end = url.size();
  return host_end > scheme_end + 3;
}

std::string capitalize_first(std::string_view text) {
  std::string out(text);
  if (!out.empty()) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

}  // namespace metasynth
