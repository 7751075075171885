#include "metasynth/http_clients.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "metasynth/errors.hpp"

namespace metasynth {

namespace {

struct EndpointParts {
  std::string base;  // scheme://host[:port]
  std::string path;
};

EndpointParts split_endpoint(const std::string& endpoint) {
  const std::size_t scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(Errc::config_invalid, "endpoint must include a scheme: " + endpoint);
  }
  const std::size_t path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

httplib::Headers auth_headers(const char* env_var) {
  httplib::Headers headers;
  if (const char* key = std::getenv(env_var); key != nullptr && key[0] != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  return headers;
}

/// Runs `request` up to retry.attempts times with exponential backoff.
/// Returns the body of the first 2xx response; throws transport otherwise.
template <typename RequestFn>
std::string with_retries(const HttpRetryPolicy& retry, const std::string& what,
                         RequestFn&& request) {
  std::string last_status = "no response";
  for (int attempt = 0; attempt < retry.attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(retry.backoff_ms * (1 << (attempt - 1))));
    }
    httplib::Result result = request();
    if (result && result->status >= 200 && result->status < 300) {
      return result->body;
    }
    last_status = result ? ("HTTP " + std::to_string(result->status))
                         : std::string("connection failed");
  }
  throw Error(Errc::transport, what + ": " + last_status + " after " +
                                   std::to_string(retry.attempts) + " attempts");
}

}  // namespace

HttpSearchClient::HttpSearchClient(std::string endpoint, int max_k, HttpRetryPolicy retry)
    : endpoint_(std::move(endpoint)), max_k_(max_k), retry_(retry) {}

std::vector<SearchResult> HttpSearchClient::search(const std::string& query, int k) {
  if (k < 1) {
    throw Error(Errc::invalid_argument, "search: k must be >= 1");
  }
  const EndpointParts parts = split_endpoint(endpoint_);
  httplib::Client client(parts.base);
  const httplib::Params params{{"q", query}, {"k", std::to_string(k)}};
  const httplib::Headers headers = auth_headers("SEARCH_API_KEY");

  const std::string body = with_retries(retry_, "search " + endpoint_, [&] {
    return client.Get(parts.path, params, headers);
  });

  nlohmann::json parsed = nlohmann::json::parse(body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("results") ||
      !parsed["results"].is_array()) {
    throw Error(Errc::client_parse, "search response is not {\"results\": [...]}");
  }
  std::vector<SearchResult> results;
  int fallback_rank = 0;
  for (const auto& item : parsed["results"]) {
    if (!item.is_object()) {
      throw Error(Errc::client_parse, "search result entry is not an object");
    }
    SearchResult result;
    result.url = item.value("url", "");
    result.title = item.value("title", "");
    result.description = item.value("description", "");
    // Providers that return an unranked list get ranks assigned by order.
    result.rank = item.contains("rank") ? item["rank"].get<int>() : ++fallback_rank;
    if (result.url.empty() || result.title.empty()) {
      throw Error(Errc::client_parse, "search result missing url or title");
    }
    if (result.description.empty()) result.description = result.title;
    results.push_back(std::move(result));
  }
  enforce_search_contract(results, k);
  return results;
}

HttpGeneratorClient::HttpGeneratorClient(std::string endpoint, std::string model,
                                         HttpRetryPolicy retry)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), retry_(retry) {}

std::string HttpGeneratorClient::send(const PromptParts& prompt) {
  const EndpointParts parts = split_endpoint(endpoint_);
  httplib::Client client(parts.base);
  httplib::Headers headers = auth_headers("LLM_API_KEY");

  const nlohmann::json request = {
      {"model", model_},
      {"temperature", 0},
      {"messages", {{{"role", "user"}, {"content", render_prompt(prompt)}}}},
  };
  const std::string payload = request.dump();

  const std::string body = with_retries(retry_, "generate " + endpoint_, [&] {
    return client.Post(parts.path, headers, payload, "application/json");
  });

  nlohmann::json parsed = nlohmann::json::parse(body, nullptr, false);
  if (parsed.is_discarded()) {
    throw Error(Errc::client_parse, "generator response is not JSON");
  }
  try {
    return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::client_parse, "generator response lacks choices[0].message.content");
  }
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string endpoint, int dimension,
                                             HttpRetryPolicy retry)
    : endpoint_(std::move(endpoint)), dimension_(dimension), retry_(retry) {}

Eigen::VectorXd HttpEmbeddingProvider::embed_text(std::string_view text) const {
  if (text.empty()) {
    throw Error(Errc::invalid_argument, "embed_text: empty text");
  }
  const EndpointParts parts = split_endpoint(endpoint_);
  httplib::Client client(parts.base);
  httplib::Headers headers = auth_headers("EMBED_API_KEY");

  const nlohmann::json request = {{"input", {std::string(text)}}};
  const std::string payload = request.dump();

  const std::string body = with_retries(retry_, "embed " + endpoint_, [&] {
    return client.Post(parts.path, headers, payload, "application/json");
  });

  nlohmann::json parsed = nlohmann::json::parse(body, nullptr, false);
  if (parsed.is_discarded()) {
    throw Error(Errc::client_parse, "embedding response is not JSON");
  }
  const nlohmann::json* rows = nullptr;
  if (parsed.is_array()) {
    rows = &parsed;
  } else if (parsed.is_object() && parsed.contains("embeddings")) {
    rows = &parsed["embeddings"];
  }
  if (rows == nullptr || !rows->is_array() || rows->empty() || !(*rows)[0].is_array()) {
    throw Error(Errc::client_parse, "embedding response is not a list of float arrays");
  }
  const auto values = (*rows)[0].get<std::vector<double>>();
  if (static_cast<int>(values.size()) != dimension_) {
    throw Error(Errc::client_parse,
                "embedding has dimension " + std::to_string(values.size()) + ", expected " +
                    std::to_string(dimension_));
  }
  Eigen::VectorXd vec = Eigen::Map<const Eigen::VectorXd>(
      values.data(), static_cast<Eigen::Index>(values.size()));
  const double norm = vec.norm();
  if (norm == 0.0) {
    throw Error(Errc::client_parse, "embedding provider returned a zero vector");
  }
  return vec / norm;
}

}  // namespace metasynth
