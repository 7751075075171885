#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace metasynth {

std::string to_lower(std::string_view text);
std::string trim(std::string_view text);

/// Lowercased alphanumeric token runs, in input order.
std::vector<std::string> tokenize(std::string_view text);

/// True when `phrase`, tokenized, occurs as a contiguous token run in `tokens`.
bool contains_token_phrase(const std::vector<std::string>& tokens,
                           std::string_view phrase);

/// Case-insensitive substring search; npos when absent.
std::size_t find_ci(std::string_view haystack, std::string_view needle,
                    std::size_t from = 0);

/// Byte offsets of all non-overlapping case-insensitive occurrences.
std::vector<std::size_t> find_all_ci(std::string_view haystack,
                                     std::string_view needle);

bool has_control_chars(std::string_view text);
std::string strip_control_chars(std::string_view text);

/// Replaces every " || " with " | " until none remain, so the snippet
/// separator cannot occur inside a sanitized field.
std::string sanitize_snippet_field(std::string_view text);

/// Title, the " || " separator, then description; both fields sanitized
/// first. Throws invalid-argument on an empty input.
std::string concat_snippet(std::string_view title, std::string_view description);

/// Inverse of concat_snippet on sanitized inputs: splits at the first " || ".
/// Throws invalid-argument when the separator is absent.
std::pair<std::string, std::string> split_snippet(std::string_view combined);

/// Lowercases scheme and host and strips trailing slashes. Path, query and
/// fragment keep their case.
std::string canonicalize_url(std::string_view url);
bool is_valid_url(std::string_view url);

std::string capitalize_first(std::string_view text);

}  // namespace metasynth
