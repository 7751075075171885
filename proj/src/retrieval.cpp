#include "metasynth/retrieval.hpp"

#include <limits>
#include <set>

#include "metasynth/errors.hpp"
#include "metasynth/refinement.hpp"
#include "metasynth/text.hpp"

namespace metasynth {

std::vector<std::string> QueryResolution::query_texts() const {
  std::vector<std::string> texts;
  texts.reserve(queries.size());
  for (const auto& [query, sim] : queries) texts.push_back(query);
  return texts;
}

std::vector<std::string> expand_queries(const ProductPage& page, GeneratorClient& generator,
                                        int n_expand) {
  if (n_expand < 1) {
    throw Error(Errc::invalid_argument, "expand_queries: n_expand must be >= 1");
  }
  validate_page(page);
  const std::string completion = generator.send(assemble_expand_prompt(page, n_expand));

  std::vector<std::string> queries;
  std::set<std::string> seen;
  std::size_t start = 0;
  while (start <= completion.size() &&
         queries.size() < static_cast<std::size_t>(n_expand)) {
    std::size_t end = completion.find('\n', start);
    if (end == std::string::npos) end = completion.size();
    const std::string query = to_lower(trim(completion.substr(start, end - start)));
    if (!query.empty() && seen.insert(query).second) {
      queries.push_back(query);
    }
    if (end == completion.size()) break;
    start = end + 1;
  }
  if (queries.empty()) {
    throw Error(Errc::expansion_empty, "expand_queries: no usable queries for page " + page.page_id);
  }
  return queries;
}

std::vector<std::string> relevance_filter(
    const std::vector<std::string>& queries, const std::string& target_url,
    SearchClient& search, int k_hit,
    std::vector<std::pair<std::string, std::string>>* dropped) {
  if (k_hit < 1) {
    throw Error(Errc::invalid_argument, "relevance_filter: k_hit must be >= 1");
  }
  const std::string target = canonicalize_url(target_url);
  std::vector<std::string> kept;
  for (const std::string& query : queries) {
    std::vector<SearchResult> results;
    try {
      results = search.search(query, k_hit);
    } catch (const Error& error) {
      if (dropped != nullptr) dropped->emplace_back(query, error.what());
      continue;
    }
    for (const SearchResult& result : results) {
      if (canonicalize_url(result.url) == target) {
        kept.push_back(query);
        break;
      }
    }
  }
  return kept;
}

std::size_t augment_library(ExemplarLibrary& library, const std::vector<std::string>& queries,
                            SearchClient& search, int k_aug, const std::string& exclude_url) {
  const std::string excluded = canonicalize_url(exclude_url);
  std::size_t added = 0;
  for (const std::string& query : queries) {
    std::vector<SearchResult> results;
    try {
      results = search.search(query, k_aug);
    } catch (const Error&) {
      continue;  // per-query failures do not abort augmentation
    }
    library.ensure_query(query);
    for (const SearchResult& result : results) {
      if (canonicalize_url(result.url) == excluded) continue;
      const AddOutcome outcome = library.add(make_exemplar(
          library.embedder(), query, result.url, result.title, result.description,
          result.rank));
      if (outcome.added) ++added;
    }
  }
  return added;
}

QueryResolution resolve_queries(const ProductPage& page, ExemplarLibrary& library,
                                SearchClient& search, GeneratorClient& generator,
                                const PipelineConfig& config) {
  validate_page(page);
  const Eigen::VectorXd z_x = embed_page(library.embedder(), page);

  QueryResolution resolution;
  // An empty library behaves as s* = -inf so the expansion branch fires.
  resolution.s_star = -std::numeric_limits<double>::infinity();
  if (!library.query_embeddings().empty()) {
    resolution.s_star = library.nearest_query(z_x).second;
  }

  if (resolution.s_star >= config.tau_q) {
    resolution.mode = QueryResolution::Mode::matched;
    for (auto& [query, sim] : library.queries_above(z_x, config.tau_q)) {
      resolution.queries.emplace_back(query, sim);
    }
    return resolution;
  }

  resolution.mode = QueryResolution::Mode::expanded;
  resolution.expansion_attempted = true;
  const std::vector<std::string> candidates =
      expand_queries(page, generator, config.n_expand);
  const std::vector<std::string> surviving =
      relevance_filter(candidates, page.url, search, config.k_hit);
  if (surviving.empty()) {
    throw NoCoverageError("no expanded query retrieves " + page.url + " within top-" +
                              std::to_string(config.k_hit),
                          candidates);
  }
  resolution.augmented_count =
      augment_library(library, surviving, search, config.k_aug, page.url);
  for (const std::string& query : surviving) {
    resolution.queries.emplace_back(query, std::nullopt);
  }
  return resolution;
}

}  // namespace metasynth
