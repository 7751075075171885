#pragma once

#include <memory>
#include <string>
#include <vector>

#include "metasynth/clients.hpp"
#include "metasynth/embedding.hpp"
#include "metasynth/guardrails.hpp"
#include "metasynth/metrics.hpp"
#include "metasynth/refinement.hpp"
#include "metasynth/types.hpp"

namespace metasynth {

struct SearchSettings {
  std::string type = "simulated";  // simulated | http
  std::string corpus_path;         // simulated
  std::string endpoint;            // http
  int max_k = 50;
};

struct GeneratorSettings {
  std::string type = "mock";  // mock | http
  std::string endpoint;
  std::string model;
};

struct EmbeddingSettings {
  std::string type = "reference";  // reference | http
  std::string endpoint;
};

/// Everything a run needs: pipeline hyperparameters, guardrails, evaluator
/// lexicons and client selection.
struct AppConfig {
  PipelineConfig pipeline;
  Guardrails guardrails = default_guardrails();
  EvaluatorSettings evaluator = default_evaluator_settings();
  SearchSettings search;
  GeneratorSettings generator;
  EmbeddingSettings embedding;
  NdcgGain ndcg_gain = NdcgGain::exponential;
};

/// Parses a JSON config file, applies defaults for absent keys, validates
/// every invariant (config-invalid names the key) and warns on unknown keys
/// via `warnings`.
AppConfig load_config(const std::string& path, std::vector<std::string>* warnings = nullptr);
AppConfig parse_config_json(const std::string& json_text,
                            std::vector<std::string>* warnings = nullptr);

/// Canonical JSON of the effective config, defaults included. Feeding this
/// back through parse_config_json reproduces the same config.
std::string effective_config_json(const AppConfig& config);

std::shared_ptr<const EmbeddingProvider> make_embedding_provider(const AppConfig& config);
std::unique_ptr<SearchClient> make_search_client(
    const AppConfig& config, std::shared_ptr<const EmbeddingProvider> provider);
std::unique_ptr<GeneratorClient> make_generator_client(const AppConfig& config);

// Page files: {"page_id", "url", "attributes": [{"name", "value"}, ...]}.
ProductPage load_page(const std::string& path);
std::vector<ProductPage> load_pages(const std::string& file_or_dir);

/// Seed queries: plain text, one query per line, blank lines and lines
/// starting with '#' ignored.
std::vector<std::string> load_seed_queries(const std::string& path);

}  // namespace metasynth
