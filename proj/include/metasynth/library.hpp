#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "metasynth/embedding.hpp"
#include "metasynth/types.hpp"

namespace metasynth {

class SearchClient;

/// Outcome of add(): either the exemplar was appended under a fresh id, or
/// it was rejected as a duplicate of the stored exemplar `id`.
struct AddOutcome {
  bool added = false;
  std::size_t id = 0;
};

/// The exemplar success library L: a deduplicated, append-only exemplar
/// store with a query-to-exemplar map I(q) and a dense d-by-N embedding
/// matrix for similarity scans.
///
/// Dedup is global: a candidate is rejected when its snippet embedding has
/// cosine similarity above epsilon_dup with ANY stored exemplar, and the
/// earlier-inserted exemplar survives. The scan index is exact brute force;
/// at desk scale a matrix-vector product over the embedding matrix is both
/// the oracle and the implementation.
class ExemplarLibrary {
 public:
  ExemplarLibrary(std::shared_ptr<const EmbeddingProvider> embedder, double epsilon_dup);

  int dimension() const { return embedder_->dimension(); }
  double epsilon_dup() const { return epsilon_dup_; }
  const EmbeddingProvider& embedder() const { return *embedder_; }
  std::shared_ptr<const EmbeddingProvider> embedder_ptr() const { return embedder_; }

  std::size_t size() const { return exemplars_.size(); }
  const Exemplar& exemplar(std::size_t id) const { return exemplars_.at(id); }
  const std::vector<Exemplar>& exemplars() const { return exemplars_; }
  const std::map<std::string, std::vector<std::size_t>>& query_index() const {
    return query_index_;
  }
  const std::map<std::string, Eigen::VectorXd>& query_embeddings() const {
    return query_embeddings_;
  }

  /// Registers `query` in the index (with its embedding) even when no
  /// exemplar survives for it.
  void ensure_query(const std::string& query);

  /// Appends unless a stored exemplar is closer than epsilon_dup.
  AddOutcome add(const Exemplar& exemplar);

  /// Cosine of `v` against every stored exemplar embedding (dot products;
  /// everything stored is unit-norm).
  Eigen::VectorXd similarities(const Eigen::VectorXd& v) const;

  /// Highest-similarity stored query for z_x and that similarity; ties go to
  /// the lexicographically smallest query. Throws not-found when empty.
  std::pair<std::string, double> nearest_query(const Eigen::VectorXd& z_x) const;

  /// All stored queries with similarity >= tau_q, sorted by similarity
  /// descending, ties lexicographic.
  std::vector<std::pair<std::string, double>> queries_above(const Eigen::VectorXd& z_x,
                                                            double tau_q) const;

  /// Union of I(q) over the given queries, duplicates removed, insertion
  /// order preserved. Unknown queries contribute nothing.
  std::vector<std::size_t> exemplars_for_queries(const std::vector<std::string>& queries) const;

  /// Copies of the exemplars selected by exemplars_for_queries.
  std::vector<Exemplar> pool_for_queries(const std::vector<std::string>& queries) const;

  void save(const std::string& path) const;
  static ExemplarLibrary load(const std::string& path,
                              std::shared_ptr<const EmbeddingProvider> embedder);

 private:
  std::shared_ptr<const EmbeddingProvider> embedder_;
  double epsilon_dup_;
  std::vector<Exemplar> exemplars_;
  Eigen::MatrixXd matrix_;  // d x capacity; first size() columns are live
  std::map<std::string, std::vector<std::size_t>> query_index_;
  std::map<std::string, Eigen::VectorXd> query_embeddings_;
  std::map<std::pair<std::string, std::string>, std::size_t> by_query_url_;
};

/// Embeds the concatenated snippet and assembles a validated exemplar.
Exemplar make_exemplar(const EmbeddingProvider& provider, std::string query,
                       std::string url, std::string title, std::string description,
                       int rank);

struct BuildStats {
  std::size_t fetched = 0;
  std::size_t stored = 0;
  std::size_t duplicates = 0;
  std::vector<std::pair<std::string, std::string>> skipped_queries;  // (query, reason)
};

/// Offline phase: fetch top-k_lib results for every seed query and feed them
/// through dedup insertion. Failed queries are skipped with a reason; if
/// every query fails the build fails.
BuildStats build_library(ExemplarLibrary& library, const std::vector<std::string>& seed_queries,
                         SearchClient& search, const PipelineConfig& config);

}  // namespace metasynth
