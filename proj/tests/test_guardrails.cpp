#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "metasynth/errors.hpp"
#include "metasynth/guardrails.hpp"
#include "metasynth/text.hpp"

using namespace metasynth;

namespace {

Guardrails rails_with_hard(std::vector<std::string> entries) {
  Guardrails rails = default_guardrails();
  for (std::string& entry : entries) rails.hard_prohibitions.push_back(make_hard_rule(entry));
  return rails;
}

// Brute-force oracle: an H literal occurs iff lowercased substring search
// finds it.
bool oracle_any_hit(const std::string& text, const std::vector<std::string>& entries) {
  const std::string lowered = to_lower(text);
  for (const std::string& entry : entries) {
    if (lowered.find(to_lower(entry)) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("scan finds direct substring violations") {
  const Guardrails rails = rails_with_hard({"guaranteed"});
  const auto violations = scan_hard_constraints("Best price guaranteed!", rails);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].phrase == "guaranteed");
  CHECK(violations[0].begin == 11);
  CHECK(violations[0].end == 21);
}

TEST_CASE("scan returns empty when nothing matches") {
  const Guardrails rails = rails_with_hard({"guaranteed"});
  CHECK(scan_hard_constraints("Soft cotton tee.", rails).empty());
}

TEST_CASE("scan enumerates matches case-insensitively across entries") {
  const Guardrails rails = rails_with_hard({"guaranteed", "cure"});
  const auto violations = scan_hard_constraints("GUARANTEED cure", rails);
  CHECK(violations.size() == 2);
}

TEST_CASE("scan agrees with the brute-force substring oracle") {
  const std::vector<std::string> entries = {"guaranteed", "best price", "cure"};
  const Guardrails rails = rails_with_hard(entries);
  std::mt19937 rng(5);
  static const char* pieces[] = {"soft",  "Guaranteed", "tee",  "BEST Price",
                                 "mug",   "cure-all",   "shop", "now"};
  std::uniform_int_distribution<int> pick(0, 7);
  for (int i = 0; i < 300; ++i) {
    std::string text;
    for (int j = 0; j < 4; ++j) {
      if (j > 0) text.push_back(' ');
      text += pieces[pick(rng)];
    }
    CHECK(scan_hard_constraints(text, rails).empty() == !oracle_any_hit(text, entries));
  }
}

TEST_CASE("regex prohibitions match case-insensitively") {
  const Guardrails rails = rails_with_hard({"re:best\\s+price"});
  const auto violations = scan_hard_constraints("the BEST   Price around", rails);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].phrase == "best   price");
}

TEST_CASE("required elements report missing names") {
  Guardrails rails = default_guardrails();
  rails.required_elements.push_back(make_required_element("cta", {"shop now", "buy now"}));

  CHECK(check_required_elements({"Mug", "Great mug. Shop now."}, rails).empty());

  rails.required_elements.push_back(make_required_element("brand", {"Acme"}));
  const auto missing = check_required_elements({"Mug", "Buy Now!"}, rails);
  REQUIRE(missing.size() == 1);
  CHECK(missing[0] == "brand");

  const auto both = check_required_elements({"Plain mug", "No frills."}, rails);
  CHECK(both == std::vector<std::string>{"cta", "brand"});
}

TEST_CASE("required element patterns work") {
  Guardrails rails = default_guardrails();
  rails.required_elements.push_back(make_required_pattern("sku", "SKU-\\d{4}"));
  CHECK(check_required_elements({"Mug SKU-1234", "Nice."}, rails).empty());
  CHECK(check_required_elements({"Mug", "Nice."}, rails) == std::vector<std::string>{"sku"});
}

TEST_CASE("check runs on the concatenated snippet, title included") {
  Guardrails rails = default_guardrails();
  rails.required_elements.push_back(make_required_element("cta", {"buy now"}));
  CHECK(check_required_elements({"Buy now: mug", "Plain text."}, rails).empty());
}

TEST_CASE("guardrail validation catches bad thresholds") {
  Guardrails rails = default_guardrails();
  CHECK_NOTHROW(validate_guardrails(rails));
  rails.thresholds["promo"] = 1.5;
  CHECK_THROWS_AS(validate_guardrails(rails), Error);
  rails.thresholds["promo"] = 0.34;
  rails.thresholds["bogus"] = 0.5;
  CHECK_THROWS_AS(validate_guardrails(rails), Error);
  rails.thresholds.erase("bogus");
  rails.thresholds.erase("cta");
  CHECK_THROWS_AS(validate_guardrails(rails), Error);
}
