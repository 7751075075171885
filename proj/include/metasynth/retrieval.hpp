#pragma once

#include <optional>
#include <string>
#include <vector>

#include "metasynth/clients.hpp"
#include "metasynth/library.hpp"
#include "metasynth/types.hpp"

namespace metasynth {

/// How the query set Q_S(x) for a page was obtained. In matched mode every
/// query carries its similarity and clears tau_q; in expanded mode every
/// query passed the K_hit relevance filter (similarity absent).
struct QueryResolution {
  enum class Mode { matched, expanded };

  Mode mode = Mode::matched;
  std::vector<std::pair<std::string, std::optional<double>>> queries;
  double s_star = 0.0;
  bool expansion_attempted = false;
  std::size_t augmented_count = 0;

  std::vector<std::string> query_texts() const;
};

/// Expand(a(x)): asks the generator for candidate queries and normalizes
/// them (trimmed, lowercased, deduplicated, at most n_expand). Throws
/// expansion-empty when nothing usable comes back.
std::vector<std::string> expand_queries(const ProductPage& page, GeneratorClient& generator,
                                        int n_expand);

/// Keeps exactly the queries whose top-k_hit results contain the target URL
/// (canonicalized comparison). Queries whose search fails are dropped; the
/// reasons land in `dropped` when provided.
std::vector<std::string> relevance_filter(
    const std::vector<std::string>& queries, const std::string& target_url,
    SearchClient& search, int k_hit,
    std::vector<std::pair<std::string, std::string>>* dropped = nullptr);

/// Harvests top-k_aug results of each (already filtered) query into the
/// library, skipping the target URL, and registers the queries in I(.).
/// Returns the number of exemplars actually stored after dedup.
std::size_t augment_library(ExemplarLibrary& library, const std::vector<std::string>& queries,
                            SearchClient& search, int k_aug, const std::string& exclude_url);

/// Algorithm: embed the page; when a stored query clears tau_q, return all
/// stored queries above the threshold (matched). Otherwise expand, filter by
/// demonstrated retrieval of the page, augment the library and return the
/// surviving queries (expanded). Throws NoCoverageError when expansion
/// leaves nothing.
QueryResolution resolve_queries(const ProductPage& page, ExemplarLibrary& library,
                                SearchClient& search, GeneratorClient& generator,
                                const PipelineConfig& config);

}  // namespace metasynth
