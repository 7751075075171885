#include "metasynth/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "metasynth/errors.hpp"
#include "metasynth/http_clients.hpp"
#include "metasynth/mock_generator.hpp"
#include "metasynth/simulated_search.hpp"
#include "metasynth/text.hpp"

namespace metasynth {

namespace {

using nlohmann::json;

void warn_unknown_keys(const json& object, const std::set<std::string>& known,
                       const std::string& scope, std::vector<std::string>* warnings) {
  if (warnings == nullptr || !object.is_object()) return;
  for (const auto& [key, value] : object.items()) {
    if (known.find(key) == known.end()) {
      warnings->push_back("unknown config key " + scope + key);
    }
  }
}

template <typename T>
void read_into(const json& object, const char* key, T& target) {
  if (!object.contains(key)) return;
  try {
    target = object.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::config_invalid, std::string(key) + ": wrong type");
  }
}

std::vector<std::string> read_lexicon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::config_invalid, "promo_lexicon_path: cannot open " + path);
  }
  std::vector<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    const std::string term = trim(line);
    if (!term.empty() && term[0] != '#') terms.push_back(to_lower(term));
  }
  return terms;
}

Guardrails parse_guardrails(const json& object, std::vector<std::string>* warnings) {
  Guardrails rails = default_guardrails();
  warn_unknown_keys(object, {"hard_prohibitions", "required_elements", "thresholds"},
                    "guardrails.", warnings);
  if (object.contains("hard_prohibitions")) {
    rails.hard_prohibitions.clear();
    for (const auto& entry : object.at("hard_prohibitions")) {
      if (!entry.is_string()) {
        throw Error(Errc::config_invalid, "guardrails.hard_prohibitions: entries must be strings");
      }
      try {
        rails.hard_prohibitions.push_back(make_hard_rule(entry.get<std::string>()));
      } catch (const std::regex_error& ex) {
        throw Error(Errc::config_invalid,
                    "guardrails.hard_prohibitions: bad pattern (" + std::string(ex.what()) + ")");
      }
    }
  }
  if (object.contains("required_elements")) {
    rails.required_elements.clear();
    for (const auto& entry : object.at("required_elements")) {
      if (!entry.is_object() || !entry.contains("name")) {
        throw Error(Errc::config_invalid, "guardrails.required_elements: entries need a name");
      }
      const std::string name = entry.at("name").get<std::string>();
      try {
        if (entry.contains("pattern")) {
          rails.required_elements.push_back(
              make_required_pattern(name, entry.at("pattern").get<std::string>()));
        } else if (entry.contains("phrases")) {
          rails.required_elements.push_back(make_required_element(
              name, entry.at("phrases").get<std::vector<std::string>>()));
        } else {
          throw Error(Errc::config_invalid,
                      "guardrails.required_elements: " + name + " needs phrases or pattern");
        }
      } catch (const std::regex_error& ex) {
        throw Error(Errc::config_invalid, "guardrails.required_elements: bad pattern (" +
                                              std::string(ex.what()) + ")");
      }
    }
  }
  if (object.contains("thresholds")) {
    for (const auto& [key, value] : object.at("thresholds").items()) {
      if (!value.is_number()) {
        throw Error(Errc::config_invalid, "guardrails.thresholds." + key + ": must be a number");
      }
      rails.thresholds[key] = value.get<double>();
    }
  }
  validate_guardrails(rails);
  return rails;
}

}  // namespace

AppConfig parse_config_json(const std::string& json_text, std::vector<std::string>* warnings) {
  json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded() || !root.is_object()) {
    throw Error(Errc::config_invalid, "config is not a JSON object");
  }

  AppConfig config;
  warn_unknown_keys(root,
                    {"pipeline", "guardrails", "evaluator", "search", "generator",
                     "embedding", "ndcg_gain"},
                    "", warnings);

  if (root.contains("pipeline")) {
    const json& p = root.at("pipeline");
    warn_unknown_keys(p,
                      {"k_lib", "k_hit", "k_aug", "epsilon_dup", "tau_q", "m", "lambda",
                       "gamma", "k_max", "stagnation_delta", "stagnation_window",
                       "stagnation_enabled", "dimension", "n_expand", "workers"},
                      "pipeline.", warnings);
    read_into(p, "k_lib", config.pipeline.k_lib);
    read_into(p, "k_hit", config.pipeline.k_hit);
    read_into(p, "k_aug", config.pipeline.k_aug);
    read_into(p, "epsilon_dup", config.pipeline.epsilon_dup);
    read_into(p, "tau_q", config.pipeline.tau_q);
    read_into(p, "m", config.pipeline.m);
    read_into(p, "lambda", config.pipeline.lambda);
    read_into(p, "gamma", config.pipeline.gamma);
    read_into(p, "k_max", config.pipeline.k_max);
    read_into(p, "stagnation_delta", config.pipeline.stagnation_delta);
    read_into(p, "stagnation_window", config.pipeline.stagnation_window);
    read_into(p, "stagnation_enabled", config.pipeline.stagnation_enabled);
    read_into(p, "dimension", config.pipeline.dimension);
    read_into(p, "n_expand", config.pipeline.n_expand);
    read_into(p, "workers", config.pipeline.workers);
  }
  config.pipeline.validate();

  if (root.contains("guardrails")) {
    config.guardrails = parse_guardrails(root.at("guardrails"), warnings);
  }

  if (root.contains("evaluator")) {
    const json& e = root.at("evaluator");
    warn_unknown_keys(e, {"promo_lexicon", "promo_lexicon_path", "cta_phrases"},
                      "evaluator.", warnings);
    if (e.contains("promo_lexicon_path")) {
      config.evaluator.promo_lexicon =
          read_lexicon_file(e.at("promo_lexicon_path").get<std::string>());
    }
    if (e.contains("promo_lexicon")) {
      read_into(e, "promo_lexicon", config.evaluator.promo_lexicon);
    }
    read_into(e, "cta_phrases", config.evaluator.cta_phrases);
    if (config.evaluator.promo_lexicon.empty() || config.evaluator.cta_phrases.empty()) {
      throw Error(Errc::config_invalid, "evaluator: lexicons must be non-empty");
    }
  }

  if (root.contains("search")) {
    const json& s = root.at("search");
    warn_unknown_keys(s, {"type", "corpus_path", "endpoint", "max_k"}, "search.", warnings);
    read_into(s, "type", config.search.type);
    read_into(s, "corpus_path", config.search.corpus_path);
    read_into(s, "endpoint", config.search.endpoint);
    read_into(s, "max_k", config.search.max_k);
    if (config.search.type != "simulated" && config.search.type != "http") {
      throw Error(Errc::config_invalid, "search.type: must be simulated or http");
    }
  }

  if (root.contains("generator")) {
    const json& g = root.at("generator");
    warn_unknown_keys(g, {"type", "endpoint", "model"}, "generator.", warnings);
    read_into(g, "type", config.generator.type);
    read_into(g, "endpoint", config.generator.endpoint);
    read_into(g, "model", config.generator.model);
    if (config.generator.type != "mock" && config.generator.type != "http") {
      throw Error(Errc::config_invalid, "generator.type: must be mock or http");
    }
  }

  if (root.contains("embedding")) {
    const json& e = root.at("embedding");
    warn_unknown_keys(e, {"type", "endpoint"}, "embedding.", warnings);
    read_into(e, "type", config.embedding.type);
    read_into(e, "endpoint", config.embedding.endpoint);
    if (config.embedding.type != "reference" && config.embedding.type != "http") {
      throw Error(Errc::config_invalid, "embedding.type: must be reference or http");
    }
  }

  if (root.contains("ndcg_gain")) {
    const std::string gain = root.at("ndcg_gain").get<std::string>();
    if (gain == "exponential") {
      config.ndcg_gain = NdcgGain::exponential;
    } else if (gain == "linear") {
      config.ndcg_gain = NdcgGain::linear;
    } else {
      throw Error(Errc::config_invalid, "ndcg_gain: must be exponential or linear");
    }
  }

  return config;
}

AppConfig load_config(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::config_invalid, "config: cannot open " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();

  // Resource paths in the file resolve relative to the file itself.
  namespace fs = std::filesystem;
  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&base](std::string& p) {
    if (!p.empty() && fs::path(p).is_relative()) p = (base / p).string();
  };
  nlohmann::json root = nlohmann::json::parse(buffer.str(), nullptr, false);
  if (root.is_object() && root.contains("evaluator") &&
      root["evaluator"].contains("promo_lexicon_path")) {
    std::string lexicon_path = root["evaluator"]["promo_lexicon_path"].get<std::string>();
    resolve(lexicon_path);
    root["evaluator"]["promo_lexicon_path"] = lexicon_path;
  }
  AppConfig config = parse_config_json(root.is_discarded() ? buffer.str() : root.dump(),
                                       warnings);
  resolve(config.search.corpus_path);
  return config;
}

std::string effective_config_json(const AppConfig& config) {
  json rails_hard = json::array();
  for (const HardRule& rule : config.guardrails.hard_prohibitions) {
    rails_hard.push_back(rule.raw);
  }
  json rails_required = json::array();
  for (const RequiredElement& element : config.guardrails.required_elements) {
    if (element.pattern_text.has_value()) {
      rails_required.push_back({{"name", element.name}, {"pattern", *element.pattern_text}});
    } else {
      rails_required.push_back({{"name", element.name}, {"phrases", element.phrases}});
    }
  }
  json root = {
      {"pipeline",
       {{"k_lib", config.pipeline.k_lib},
        {"k_hit", config.pipeline.k_hit},
        {"k_aug", config.pipeline.k_aug},
        {"epsilon_dup", config.pipeline.epsilon_dup},
        {"tau_q", config.pipeline.tau_q},
        {"m", config.pipeline.m},
        {"lambda", config.pipeline.lambda},
        {"gamma", config.pipeline.gamma},
        {"k_max", config.pipeline.k_max},
        {"stagnation_delta", config.pipeline.stagnation_delta},
        {"stagnation_window", config.pipeline.stagnation_window},
        {"stagnation_enabled", config.pipeline.stagnation_enabled},
        {"dimension", config.pipeline.dimension},
        {"n_expand", config.pipeline.n_expand},
        {"workers", config.pipeline.workers}}},
      {"guardrails",
       {{"hard_prohibitions", rails_hard},
        {"required_elements", rails_required},
        {"thresholds", config.guardrails.thresholds}}},
      {"evaluator",
       {{"promo_lexicon", config.evaluator.promo_lexicon},
        {"cta_phrases", config.evaluator.cta_phrases}}},
      {"search",
       {{"type", config.search.type},
        {"corpus_path", config.search.corpus_path},
        {"endpoint", config.search.endpoint},
        {"max_k", config.search.max_k}}},
      {"generator",
       {{"type", config.generator.type},
        {"endpoint", config.generator.endpoint},
        {"model", config.generator.model}}},
      {"embedding",
       {{"type", config.embedding.type}, {"endpoint", config.embedding.endpoint}}},
      {"ndcg_gain", config.ndcg_gain == NdcgGain::linear ? "linear" : "exponential"},
  };
  return root.dump(2);
}

std::shared_ptr<const EmbeddingProvider> make_embedding_provider(const AppConfig& config) {
  if (config.embedding.type == "http") {
    if (config.embedding.endpoint.empty()) {
      throw Error(Errc::config_invalid, "embedding.endpoint: required for http provider");
    }
    return std::make_shared<HttpEmbeddingProvider>(config.embedding.endpoint,
                                                   config.pipeline.dimension);
  }
  return std::make_shared<MemoizingProvider>(
      std::make_shared<HashingEmbedder>(config.pipeline.dimension));
}

std::unique_ptr<SearchClient> make_search_client(
    const AppConfig& config, std::shared_ptr<const EmbeddingProvider> provider) {
  if (config.search.type == "http") {
    if (config.search.endpoint.empty()) {
      throw Error(Errc::config_invalid, "search.endpoint: required for http client");
    }
    return std::make_unique<HttpSearchClient>(config.search.endpoint, config.search.max_k);
  }
  if (config.search.corpus_path.empty()) {
    throw Error(Errc::config_invalid, "search.corpus_path: required for simulated search");
  }
  return std::make_unique<SimulatedSearchEngine>(load_corpus(config.search.corpus_path),
                                                 std::move(provider));
}

std::unique_ptr<GeneratorClient> make_generator_client(const AppConfig& config) {
  if (config.generator.type == "http") {
    if (config.generator.endpoint.empty()) {
      throw Error(Errc::config_invalid, "generator.endpoint: required for http client");
    }
    return std::make_unique<HttpGeneratorClient>(config.generator.endpoint,
                                                 config.generator.model);
  }
  return std::make_unique<MockGeneratorClient>();
}

ProductPage load_page(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::io_error, "load_page: cannot open " + path);
  }
  json record;
  try {
    in >> record;
  } catch (const json::exception& ex) {
    throw Error(Errc::load_failed, path + ": not valid JSON (" + std::string(ex.what()) + ")");
  }
  ProductPage page;
  try {
    page.page_id = record.at("page_id").get<std::string>();
    page.url = record.at("url").get<std::string>();
    for (const auto& entry : record.at("attributes")) {
      Attribute attribute;
      attribute.name = entry.at("name").get<std::string>();
      // Values are single-line by contract; normalize stray control chars.
      attribute.value = trim(strip_control_chars(entry.at("value").get<std::string>()));
      page.attributes.push_back(std::move(attribute));
    }
  } catch (const json::exception& ex) {
    throw Error(Errc::load_failed, path + ": bad page record (" + std::string(ex.what()) + ")");
  }
  validate_page(page);
  return page;
}

std::vector<ProductPage> load_pages(const std::string& file_or_dir) {
  namespace fs = std::filesystem;
  std::vector<ProductPage> pages;
  if (fs::is_directory(file_or_dir)) {
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(file_or_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        paths.push_back(entry.path().string());
      }
    }
    std::sort(paths.begin(), paths.end());
    for (const std::string& path : paths) pages.push_back(load_page(path));
  } else if (fs::exists(file_or_dir)) {
    pages.push_back(load_page(file_or_dir));
  } else {
    throw Error(Errc::not_found, "pages: no such file or directory: " + file_or_dir);
  }
  std::set<std::string> ids;
  for (const ProductPage& page : pages) {
    if (!ids.insert(page.page_id).second) {
      throw Error(Errc::invalid_argument, "pages: duplicate page_id " + page.page_id);
    }
  }
  return pages;
}

std::vector<std::string> load_seed_queries(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::io_error, "seeds: cannot open " + path);
  }
  std::vector<std::string> seeds;
  std::string line;
  while (std::getline(in, line)) {
    const std::string query = trim(line);
    if (!query.empty() && query[0] != '#') seeds.push_back(query);
  }
  if (seeds.empty()) {
    throw Error(Errc::invalid_argument, "seeds: file has no queries: " + path);
  }
  return seeds;
}

}  // namespace metasynth
