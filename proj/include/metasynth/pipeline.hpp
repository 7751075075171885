#pragma once

#include <optional>
#include <string>
#include <vector>

#include "metasynth/config.hpp"
#include "metasynth/library.hpp"
#include "metasynth/refinement.hpp"
#include "metasynth/retrieval.hpp"

namespace metasynth {

/// Outcome of the online phase for one page.
struct PageResult {
  std::string page_id;
  RefinementTrace trace;
  std::vector<std::string> queries_used;
  std::string mode;  // matched | expanded | zero-shot
  std::size_t augmented_count = 0;
  std::size_t exemplar_count = 0;
};

/// Retrieval-side work for one page: query resolution, pool assembly and
/// few-shot selection. Touches the library (reads, and augments in expanded
/// mode); concurrent callers must serialize through one writer.
struct PreparedPage {
  std::vector<Exemplar> few_shot;
  std::vector<std::string> queries_used;
  std::string mode;  // matched | expanded | zero-shot
  std::size_t augmented_count = 0;
};

PreparedPage prepare_page(const ProductPage& page, ExemplarLibrary& library,
                          SearchClient& search, GeneratorClient& generator,
                          const AppConfig& config);

/// Resolve queries, assemble the exemplar pool, select few-shots and run the
/// refinement loop. A no-coverage resolution falls back to zero-shot
/// generation instead of failing the page.
PageResult generate_for_page(const ProductPage& page, ExemplarLibrary& library,
                             SearchClient& search, GeneratorClient& generator,
                             const AppConfig& config);

/// Stable JSON for a page result (snippet, stop reason, per-iteration
/// scores and directives, queries used).
std::string page_result_json(const PageResult& result);

struct BatchOutcome {
  std::size_t ok = 0;
  std::size_t failed = 0;
  std::size_t accepted = 0;
  std::size_t augmented = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // (page_id, error)
};

/// Runs generate_for_page over a batch, writing <out_dir>/<page_id>.json per
/// page (or an {"error": ...} record on failure).
BatchOutcome run_batch(const std::vector<ProductPage>& pages, ExemplarLibrary& library,
                       SearchClient& search, GeneratorClient& generator,
                       const AppConfig& config, const std::string& out_dir);

}  // namespace metasynth
