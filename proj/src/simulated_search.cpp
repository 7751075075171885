#include "metasynth/simulated_search.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "metasynth/errors.hpp"

namespace metasynth {

std::vector<SimulatedCorpusDoc> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::io_error, "load_corpus: cannot open " + path);
  }
  std::vector<SimulatedCorpusDoc> corpus;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      throw Error(Errc::load_failed,
                  path + ": malformed corpus record at line " + std::to_string(line_number));
    }
    SimulatedCorpusDoc doc;
    doc.url = record.value("url", "");
    doc.title = record.value("title", "");
    doc.description = record.value("description", "");
    doc.popularity = record.value("popularity", 0.0);
    if (doc.url.empty() || doc.title.empty() || doc.description.empty() || doc.popularity < 0) {
      throw Error(Errc::load_failed,
                  path + ": incomplete corpus record at line " + std::to_string(line_number));
    }
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

void save_corpus(const std::vector<SimulatedCorpusDoc>& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(Errc::io_error, "save_corpus: cannot open " + path + " for writing");
  }
  for (const SimulatedCorpusDoc& doc : corpus) {
    nlohmann::json record = {{"url", doc.url},
                             {"title", doc.title},
                             {"description", doc.description},
                             {"popularity", doc.popularity}};
    out << record.dump() << '\n';
  }
}

SimulatedSearchEngine::SimulatedSearchEngine(std::vector<SimulatedCorpusDoc> corpus,
                                             std::shared_ptr<const EmbeddingProvider> embedder)
    : corpus_(std::move(corpus)), embedder_(std::move(embedder)) {
  for (std::size_t i = 0; i < corpus_.size(); ++i) {
    for (std::size_t j = i + 1; j < corpus_.size(); ++j) {
      if (corpus_[i].url == corpus_[j].url) {
        throw Error(Errc::invalid_argument,
                    "simulated corpus: duplicate url " + corpus_[i].url);
      }
    }
  }
  const Eigen::Index n = static_cast<Eigen::Index>(corpus_.size());
  doc_embeddings_.resize(embedder_->dimension(), n);
  popularity_bonus_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& doc = corpus_[static_cast<std::size_t>(i)];
    doc_embeddings_.col(i) = embed_exemplar(*embedder_, doc.title, doc.description);
    popularity_bonus_[i] = 0.01 * std::log(1.0 + doc.popularity);
  }
}

std::vector<std::size_t> SimulatedSearchEngine::ranked_doc_ids(const std::string& query) {
  const Eigen::VectorXd query_embedding = embedder_->embed_text(query);
  const Eigen::VectorXd scores =
      doc_embeddings_.transpose() * query_embedding + popularity_bonus_;
  std::vector<std::size_t> order(corpus_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double sa = scores[static_cast<Eigen::Index>(a)];
    const double sb = scores[static_cast<Eigen::Index>(b)];
    if (sa != sb) return sa > sb;
    return corpus_[a].url < corpus_[b].url;
  });
  return order;
}

std::vector<SearchResult> SimulatedSearchEngine::search(const std::string& query, int k) {
  if (k < 1) {
    throw Error(Errc::invalid_argument, "search: k must be >= 1");
  }
  if (corpus_.empty()) return {};
  const std::vector<std::size_t> order = ranked_doc_ids(query);
  std::vector<SearchResult> results;
  const std::size_t limit = std::min<std::size_t>(order.size(), static_cast<std::size_t>(k));
  results.reserve(limit);
  for (std::size_t i = 0; i < limit; ++i) {
    const SimulatedCorpusDoc& doc = corpus_[order[i]];
    results.push_back({doc.url, doc.title, doc.description, static_cast<int>(i + 1)});
  }
  return results;
}

int SimulatedSearchEngine::rank_of(const std::string& query, const std::string& url) {
  const std::vector<std::size_t> order = ranked_doc_ids(query);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (corpus_[order[i]].url == url) return static_cast<int>(i + 1);
  }
  return 0;
}

}  // namespace metasynth
