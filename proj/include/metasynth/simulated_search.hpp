#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "metasynth/clients.hpp"
#include "metasynth/embedding.hpp"

namespace metasynth {

/// One document of the deterministic stand-in corpus.
struct SimulatedCorpusDoc {
  std::string url;
  std::string title;
  std::string description;
  double popularity = 0.0;
};

std::vector<SimulatedCorpusDoc> load_corpus(const std::string& path);
void save_corpus(const std::vector<SimulatedCorpusDoc>& corpus, const std::string& path);

/// Deterministic search engine over a fixed corpus. Scores each document as
///   cosine(embed(query), embed(title || description)) + 0.01 * log(1 + popularity)
/// and returns the top K by score, ties broken by URL. The popularity term
/// keeps rankings slightly off pure topical relevance, the way a production
/// engine's would be.
class SimulatedSearchEngine final : public SearchClient {
 public:
  SimulatedSearchEngine(std::vector<SimulatedCorpusDoc> corpus,
                        std::shared_ptr<const EmbeddingProvider> embedder);

  std::string name() const override { return "simulated"; }
  int max_k() const override { return static_cast<int>(corpus_.size()); }
  std::vector<SearchResult> search(const std::string& query, int k) override;

  const std::vector<SimulatedCorpusDoc>& corpus() const { return corpus_; }

  /// Rank of `url` for `query` over the whole corpus (1-based), or 0 when
  /// the URL is not in the corpus. Used by tests to pin rank positions.
  int rank_of(const std::string& query, const std::string& url);

 private:
  std::vector<std::size_t> ranked_doc_ids(const std::string& query);

  std::vector<SimulatedCorpusDoc> corpus_;
  std::shared_ptr<const EmbeddingProvider> embedder_;
  Eigen::MatrixXd doc_embeddings_;  // d x corpus size, precomputed
  Eigen::VectorXd popularity_bonus_;
};

}  // namespace metasynth
