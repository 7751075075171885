#include "metasynth/library.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "metasynth/clients.hpp"
#include "metasynth/errors.hpp"
#include "metasynth/similarity.hpp"

namespace metasynth {

namespace {

constexpr const char* kFormatTag = "metasynth-lib/1";

}  // namespace

ExemplarLibrary::ExemplarLibrary(std::shared_ptr<const EmbeddingProvider> embedder,
                                 double epsilon_dup)
    : embedder_(std::move(embedder)), epsilon_dup_(epsilon_dup) {
  if (!embedder_) {
    throw Error(Errc::invalid_argument, "library: embedding provider required");
  }
  if (epsilon_dup_ <= 0.0 || epsilon_dup_ >= 1.0) {
    throw Error(Errc::config_invalid, "epsilon_dup: must lie in (0,1)");
  }
  matrix_.resize(embedder_->dimension(), 0);
}

void ExemplarLibrary::ensure_query(const std::string& query) {
  if (query_index_.find(query) != query_index_.end()) return;
  query_index_[query] = {};
  query_embeddings_[query] = embedder_->embed_text(query);
}

AddOutcome ExemplarLibrary::add(const Exemplar& exemplar) {
  validate_exemplar(exemplar, dimension());

  // (query, url) pairs are unique within a library.
  auto key = std::make_pair(exemplar.query, exemplar.url);
  if (auto it = by_query_url_.find(key); it != by_query_url_.end()) {
    return {false, it->second};
  }

  if (!exemplars_.empty()) {
    Eigen::Index nearest = 0;
    const double best = similarities(exemplar.embedding).maxCoeff(&nearest);
    if (best > epsilon_dup_) {
      return {false, static_cast<std::size_t>(nearest)};
    }
  }

  const std::size_t id = exemplars_.size();
  if (static_cast<Eigen::Index>(id) >= matrix_.cols()) {
    const Eigen::Index capacity = std::max<Eigen::Index>(64, matrix_.cols() * 2);
    matrix_.conservativeResize(Eigen::NoChange, capacity);
  }
  matrix_.col(static_cast<Eigen::Index>(id)) = exemplar.embedding;
  exemplars_.push_back(exemplar);
  ensure_query(exemplar.query);
  query_index_[exemplar.query].push_back(id);
  by_query_url_.emplace(std::move(key), id);
  return {true, id};
}

Eigen::VectorXd ExemplarLibrary::similarities(const Eigen::VectorXd& v) const {
  if (v.size() != dimension()) {
    throw Error(Errc::invalid_argument, "similarities: dimension mismatch");
  }
  return matrix_.leftCols(static_cast<Eigen::Index>(exemplars_.size())).transpose() * v;
}

std::pair<std::string, double> ExemplarLibrary::nearest_query(const Eigen::VectorXd& z_x) const {
  if (query_embeddings_.empty()) {
    throw Error(Errc::not_found, "nearest_query: library has no queries");
  }
  // std::map iterates keys in lexicographic order, so keeping only strict
  // improvements implements the tie-break for free.
  const std::string* best_query = nullptr;
  double best = 0.0;
  for (const auto& [query, embedding] : query_embeddings_) {
    const double sim = cosine_similarity(z_x, embedding);
    if (best_query == nullptr || sim > best) {
      best_query = &query;
      best = sim;
    }
  }
  return {*best_query, best};
}

std::vector<std::pair<std::string, double>> ExemplarLibrary::queries_above(
    const Eigen::VectorXd& z_x, double tau_q) const {
  std::vector<std::pair<std::string, double>> hits;
  for (const auto& [query, embedding] : query_embeddings_) {
    const double sim = cosine_similarity(z_x, embedding);
    if (sim >= tau_q) hits.emplace_back(query, sim);
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return hits;
}

std::vector<std::size_t> ExemplarLibrary::exemplars_for_queries(
    const std::vector<std::string>& queries) const {
  std::vector<std::size_t> pool;
  std::vector<bool> seen(exemplars_.size(), false);
  for (const std::string& query : queries) {
    auto it = query_index_.find(query);
    if (it == query_index_.end()) continue;
    for (std::size_t id : it->second) {
      if (!seen[id]) {
        seen[id] = true;
        pool.push_back(id);
      }
    }
  }
  return pool;
}

std::vector<Exemplar> ExemplarLibrary::pool_for_queries(
    const std::vector<std::string>& queries) const {
  std::vector<Exemplar> pool;
  for (std::size_t id : exemplars_for_queries(queries)) {
    pool.push_back(exemplars_[id]);
  }
  return pool;
}

void ExemplarLibrary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw Error(Errc::io_error, "save_library: cannot open " + path + " for writing");
  }
  nlohmann::json header = {
      {"format", kFormatTag},
      {"dimension", dimension()},
      {"epsilon_dup", epsilon_dup_},
  };
  out << header.dump() << '\n';
  for (const Exemplar& e : exemplars_) {
    nlohmann::json record = {
        {"query", e.query},
        {"url", e.url},
        {"title", e.title},
        {"description", e.description},
        {"rank", e.rank},
        {"embedding", std::vector<double>(e.embedding.data(),
                                          e.embedding.data() + e.embedding.size())},
    };
    out << record.dump() << '\n';
  }
  if (!out) {
    throw Error(Errc::io_error, "save_library: write to " + path + " failed");
  }
}

ExemplarLibrary ExemplarLibrary::load(const std::string& path,
                                      std::shared_ptr<const EmbeddingProvider> embedder) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::library_not_found, "load_library: cannot open " + path);
  }
  std::string line;
  std::size_t line_number = 0;

  auto parse_line = [&](const std::string& text) {
    nlohmann::json parsed = nlohmann::json::parse(text, nullptr, false);
    if (parsed.is_discarded()) {
      throw Error(Errc::load_failed,
                  path + ": malformed record at line " + std::to_string(line_number));
    }
    return parsed;
  };

  if (!std::getline(in, line)) {
    throw Error(Errc::load_failed, path + ": missing header line");
  }
  ++line_number;
  nlohmann::json header = parse_line(line);
  if (!header.is_object() || header.value("format", "") != kFormatTag) {
    throw Error(Errc::load_failed, path + ": unrecognized library format at line 1");
  }
  const int file_dimension = header.value("dimension", -1);
  if (file_dimension != embedder->dimension()) {
    throw Error(Errc::load_failed,
                path + ": dimension " + std::to_string(file_dimension) +
                    " does not match provider dimension " +
                    std::to_string(embedder->dimension()));
  }
  const double epsilon = header.value("epsilon_dup", -1.0);
  if (epsilon <= 0.0 || epsilon >= 1.0) {
    throw Error(Errc::load_failed, path + ": header epsilon_dup out of range");
  }

  ExemplarLibrary library(std::move(embedder), epsilon);
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    nlohmann::json record = parse_line(line);
    Exemplar e;
    try {
      e.query = record.at("query").get<std::string>();
      e.url = record.at("url").get<std::string>();
      e.title = record.at("title").get<std::string>();
      e.description = record.at("description").get<std::string>();
      e.rank = record.at("rank").get<int>();
      const auto values = record.at("embedding").get<std::vector<double>>();
      e.embedding = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                      static_cast<Eigen::Index>(values.size()));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(Errc::load_failed, path + ": bad record at line " +
                                         std::to_string(line_number) + " (" + ex.what() + ")");
    }
    // Inserting through add() re-establishes every index and re-checks the
    // dedup invariant; a stored set never trips it (pairwise sim <= epsilon).
    library.add(e);
  }
  return library;
}

Exemplar make_exemplar(const EmbeddingProvider& provider, std::string query,
                       std::string url, std::string title, std::string description,
                       int rank) {
  Exemplar e;
  e.query = std::move(query);
  e.url = std::move(url);
  e.title = std::move(title);
  e.description = std::move(description);
  e.rank = rank;
  e.embedding = embed_exemplar(provider, e.title, e.description);
  return e;
}

BuildStats build_library(ExemplarLibrary& library, const std::vector<std::string>& seed_queries,
                         SearchClient& search, const PipelineConfig& config) {
  if (seed_queries.empty()) {
    throw Error(Errc::invalid_argument, "build_library: no seed queries");
  }
  BuildStats stats;
  std::size_t reachable = 0;
  for (const std::string& query : seed_queries) {
    std::vector<SearchResult> results;
    try {
      results = search.search(query, config.k_lib);
      enforce_search_contract(results, config.k_lib);
    } catch (const Error& error) {
      stats.skipped_queries.emplace_back(query, error.what());
      continue;
    }
    ++reachable;
    library.ensure_query(query);
    for (const SearchResult& result : results) {
      ++stats.fetched;
      const AddOutcome outcome = library.add(make_exemplar(
          library.embedder(), query, result.url, result.title, result.description,
          result.rank));
      if (outcome.added) {
        ++stats.stored;
      } else {
        ++stats.duplicates;
      }
    }
  }
  if (reachable == 0) {
    throw Error(Errc::build_failed, "build_library: every seed query failed");
  }
  return stats;
}

}  // namespace metasynth
