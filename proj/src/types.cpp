#include "metasynth/types.hpp"

#include <algorithm>

#include "metasynth/errors.hpp"
#include "metasynth/similarity.hpp"
#include "metasynth/text.hpp"

namespace metasynth {

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw Error(Errc::config_invalid, message);
}

}  // namespace

void PipelineConfig::validate() const {
  require(k_lib >= 1, "k_lib: must be a positive integer");
  require(k_hit >= 1, "k_hit: must be a positive integer");
  require(k_aug >= 1, "k_aug: must be a positive integer");
  require(epsilon_dup > 0.0 && epsilon_dup < 1.0, "epsilon_dup: must lie in (0,1)");
  require(tau_q > 0.0 && tau_q < 1.0, "tau_q: must lie in (0,1)");
  require(m >= 1, "m: must be a positive integer");
  require(lambda >= 0.0 && lambda <= 1.0, "lambda: must lie in [0,1]");
  require(k_max >= 1, "k_max: must be a positive integer");
  require(stagnation_delta >= 0.0, "stagnation_delta: must be >= 0");
  require(stagnation_window >= 1, "stagnation_window: must be a positive integer");
  require(dimension >= 1, "dimension: must be a positive integer");
  require(n_expand >= 1, "n_expand: must be a positive integer");
  require(workers >= 1, "workers: must be a positive integer");
}

void validate_page(const ProductPage& page) {
  if (page.page_id.empty()) {
    throw Error(Errc::invalid_argument, "page: page_id is empty");
  }
  if (!is_valid_url(page.url)) {
    throw Error(Errc::invalid_argument, "page " + page.page_id + ": url is not valid");
  }
  const bool any_value = std::any_of(
      page.attributes.begin(), page.attributes.end(),
      [](const Attribute& a) { return !trim(a.value).empty(); });
  if (!any_value) {
    throw Error(Errc::invalid_argument,
                "page " + page.page_id + ": needs at least one non-empty attribute");
  }
}

void validate_snippet(const Snippet& snippet) {
  if (snippet.title.empty() || snippet.description.empty()) {
    throw Error(Errc::invalid_argument, "snippet: title and description must be non-empty");
  }
  if (has_control_chars(snippet.title) || has_control_chars(snippet.description)) {
    throw Error(Errc::invalid_argument, "snippet: control characters are not allowed");
  }
}

void validate_exemplar(const Exemplar& exemplar, int expected_dimension) {
  if (exemplar.rank < 1) {
    throw Error(Errc::invalid_argument, "exemplar: rank must be >= 1");
  }
  if (exemplar.query.empty() || exemplar.title.empty() || exemplar.description.empty()) {
    throw Error(Errc::invalid_argument, "exemplar: query, title and description must be non-empty");
  }
  if (!is_valid_url(exemplar.url)) {
    throw Error(Errc::invalid_argument, "exemplar: url is not valid");
  }
  if (exemplar.embedding.size() != expected_dimension) {
    throw Error(Errc::invalid_argument,
                "exemplar: embedding dimension " + std::to_string(exemplar.embedding.size()) +
                    " != " + std::to_string(expected_dimension));
  }
  if (!is_unit_norm(exemplar.embedding)) {
    throw Error(Errc::invalid_argument, "exemplar: embedding is not unit-norm");
  }
}

const std::string* find_attribute(const ProductPage& page, std::string_view name) {
  for (const Attribute& attribute : page.attributes) {
    if (attribute.name == name) return &attribute.value;
  }
  return nullptr;
}

std::string exemplar_id(const Exemplar& exemplar) {
  return exemplar.query + '\x1f' + exemplar.url;
}

}  // namespace metasynth
