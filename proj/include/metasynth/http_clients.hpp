#pragma once

#include <Eigen/Dense>
#include <string>

#include "metasynth/clients.hpp"
#include "metasynth/embedding.hpp"

namespace metasynth {

/// Retry/backoff policy shared by the HTTP clients: `attempts` tries with
/// exponentially growing sleeps starting at `backoff_ms`.
struct HttpRetryPolicy {
  int attempts = 3;
  int backoff_ms = 100;
};

/// GET <endpoint>?q=<query>&k=<K> against a provider that answers
///   {"results": [{"url", "title", "description", "rank"?}, ...]}
/// Results lacking ranks are assigned 1..K in list order. Sends
/// "Authorization: Bearer $SEARCH_API_KEY" when the variable is set.
class HttpSearchClient final : public SearchClient {
 public:
  explicit HttpSearchClient(std::string endpoint, int max_k = 50,
                            HttpRetryPolicy retry = {});

  std::string name() const override { return "http-search"; }
  int max_k() const override { return max_k_; }
  std::vector<SearchResult> search(const std::string& query, int k) override;

 private:
  std::string endpoint_;
  int max_k_;
  HttpRetryPolicy retry_;
};

/// POST of a chat-completion style body
///   {"model", "temperature": 0, "messages": [{"role": "user", "content"}]}
/// expecting {"choices": [{"message": {"content": "..."}}]}. API key from
/// LLM_API_KEY.
class HttpGeneratorClient final : public GeneratorClient {
 public:
  HttpGeneratorClient(std::string endpoint, std::string model,
                      HttpRetryPolicy retry = {});

  std::string name() const override { return "http-generator"; }
  std::string send(const PromptParts& prompt) override;

 private:
  std::string endpoint_;
  std::string model_;
  HttpRetryPolicy retry_;
};

/// POST {"input": [texts]} expecting a list of float arrays, either bare or
/// under an "embeddings" key. Vectors are unit-normalized client side. API
/// key from EMBED_API_KEY.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string endpoint, int dimension,
                        HttpRetryPolicy retry = {});

  std::string name() const override { return "http-embedding"; }
  int dimension() const override { return dimension_; }
  Eigen::VectorXd embed_text(std::string_view text) const override;

 private:
  std::string endpoint_;
  int dimension_;
  HttpRetryPolicy retry_;
};

}  // namespace metasynth
