#pragma once

#include <Eigen/Dense>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "metasynth/clients.hpp"
#include "metasynth/errors.hpp"
#include "metasynth/types.hpp"

namespace metasynth::testing {

/// Search client with a fixed per-query script; unknown queries fail with a
/// transport error. Counts calls so branch-exclusivity tests can assert the
/// matched path never searches.
class ScriptedSearchClient final : public SearchClient {
 public:
  explicit ScriptedSearchClient(std::map<std::string, std::vector<SearchResult>> responses)
      : responses_(std::move(responses)) {}

  std::string name() const override { return "scripted"; }
  int max_k() const override { return 100; }

  std::vector<SearchResult> search(const std::string& query, int k) override {
    ++calls_;
    auto it = responses_.find(query);
    if (it == responses_.end()) {
      throw Error(Errc::transport, "scripted search: no script for query '" + query + "'");
    }
    std::vector<SearchResult> results = it->second;
    if (static_cast<int>(results.size()) > k) results.resize(static_cast<std::size_t>(k));
    return results;
  }

  int calls() const { return calls_; }

 private:
  std::map<std::string, std::vector<SearchResult>> responses_;
  int calls_ = 0;
};

/// Generator returning a fixed list of completions in order, repeating the
/// last one when exhausted.
class ScriptedGenerator final : public GeneratorClient {
 public:
  explicit ScriptedGenerator(std::vector<std::string> completions)
      : completions_(std::move(completions)) {}

  std::string name() const override { return "scripted"; }

  std::string send(const PromptParts&) override {
    ++calls_;
    if (completions_.empty()) {
      throw Error(Errc::transport, "scripted generator: no completions");
    }
    const std::size_t index = std::min(next_, completions_.size() - 1);
    ++next_;
    return completions_[index];
  }

  int calls() const { return calls_; }

 private:
  std::vector<std::string> completions_;
  std::size_t next_ = 0;
  int calls_ = 0;
};

/// Deterministic random unit vector.
inline Eigen::VectorXd random_unit_vector(std::mt19937& rng, int dimension) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(dimension);
  for (int i = 0; i < dimension; ++i) v[i] = normal(rng);
  if (v.norm() == 0.0) v[0] = 1.0;
  return v / v.norm();
}

/// Exemplar with a hand-built embedding (already unit-norm).
inline Exemplar fixture_exemplar(std::string query, std::string url, int rank,
                                 Eigen::VectorXd embedding,
                                 std::string title = "Title",
                                 std::string description = "Description text.") {
  Exemplar e;
  e.query = std::move(query);
  e.url = std::move(url);
  e.title = std::move(title);
  e.description = std::move(description);
  e.rank = rank;
  e.embedding = std::move(embedding);
  return e;
}

/// Two unit vectors whose dot product is exactly `target` up to rounding.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> vectors_with_cosine(int dimension,
                                                                       double target) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(dimension);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dimension);
  a[0] = 1.0;
  b[0] = target;
  b[1] = std::sqrt(1.0 - target * target);
  return {a, b};
}

inline ProductPage fixture_page(std::string page_id = "p1",
                                std::string url = "https://shop.example.com/p1") {
  ProductPage page;
  page.page_id = std::move(page_id);
  page.url = std::move(url);
  page.attributes = {{"name", "Red Ceramic Mug"},
                     {"brand", "Acme"},
                     {"category", "Kitchen"},
                     {"description", "Dishwasher safe ceramic mug for coffee lovers"}};
  return page;
}

}  // namespace metasynth::testing
