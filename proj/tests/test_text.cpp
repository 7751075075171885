#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "metasynth/errors.hpp"
#include "metasynth/text.hpp"

using namespace metasynth;

TEST_CASE("concat_snippet joins with the separator token") {
  CHECK(concat_snippet("Red Mug", "Ceramic 12oz mug.") == "Red Mug || Ceramic 12oz mug.");
  CHECK(concat_snippet("A", "B") == "A || B");
}

TEST_CASE("concat_snippet sanitizes embedded separators") {
  CHECK(concat_snippet("X || Y", "Z") == "X | Y || Z");
  // Sanitization runs to a fixpoint: deleting one separator must not leave
  // another behind.
  CHECK(sanitize_snippet_field("a ||  || b").find(" || ") == std::string::npos);
}

TEST_CASE("concat_snippet rejects empty fields") {
  CHECK_THROWS_AS(concat_snippet("", "x"), Error);
  CHECK_THROWS_AS(concat_snippet("x", ""), Error);
}

TEST_CASE("concat_snippet is injective on sanitized inputs") {
  std::mt19937 rng(7);
  const std::string alphabet = "ab |!";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> length(1, 12);
  for (int i = 0; i < 500; ++i) {
    std::string title, description;
    for (int j = length(rng); j > 0; --j) title.push_back(alphabet[pick(rng)]);
    for (int j = length(rng); j > 0; --j) description.push_back(alphabet[pick(rng)]);
    if (title.empty() || description.empty()) continue;
    const auto [t, d] = split_snippet(concat_snippet(title, description));
    CHECK(t == sanitize_snippet_field(title));
    CHECK(d == sanitize_snippet_field(description));
  }
}

TEST_CASE("tokenize lowercases and splits on non-alphanumerics") {
  CHECK(tokenize("Red-Ceramic MUG!") == std::vector<std::string>{"red", "ceramic", "mug"});
  CHECK(tokenize("!!!").empty());
}

TEST_CASE("contains_token_phrase matches contiguous runs") {
  const auto tokens = tokenize("Shop now for premium mugs");
  CHECK(contains_token_phrase(tokens, "shop now"));
  CHECK(contains_token_phrase(tokens, "PREMIUM"));
  CHECK_FALSE(contains_token_phrase(tokens, "now shop"));
  CHECK_FALSE(contains_token_phrase(tokens, "premiums"));
}

TEST_CASE("find_all_ci finds every occurrence") {
  CHECK(find_all_ci("Guaranteed GUARANTEED guaranteed", "guaranteed").size() == 3);
  CHECK(find_all_ci("nothing here", "guaranteed").empty());
}

TEST_CASE("canonicalize_url lowercases scheme/host and strips trailing slash") {
  CHECK(canonicalize_url("HTTPS://Shop.Example.com/Items/Mug/") ==
        "https://shop.example.com/Items/Mug");
  CHECK(canonicalize_url("https://a.com") == "https://a.com");
  CHECK(canonicalize_url("https://A.com/") == "https://a.com");
}

TEST_CASE("is_valid_url checks scheme and host") {
  CHECK(is_valid_url("https://shop.example.com/x"));
  CHECK_FALSE(is_valid_url("not a url"));
  CHECK_FALSE(is_valid_url("://missing.scheme"));
}

TEST_CASE("strip_control_chars replaces control bytes with spaces") {
  CHECK(strip_control_chars("a\tb\nc") == "a b c");
  CHECK_FALSE(has_control_chars(strip_control_chars("x\r\ny")));
}
