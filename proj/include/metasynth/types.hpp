#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

namespace metasynth {

/// One page attribute. Order of attributes is significant everywhere
/// (serialization, prompts), so pages keep them as an ordered list.
struct Attribute {
  std::string name;
  std::string value;
};

/// A retailer product page: the object we write a meta snippet for.
struct ProductPage {
  std::string page_id;
  std::string url;
  std::vector<Attribute> attributes;
};

/// A candidate meta title / meta description pair.
struct Snippet {
  std::string title;
  std::string description;
};

/// One harvested search result: query, landing URL, displayed snippet and
/// its rank on the results page (1 = top). The embedding is of the
/// concatenated snippet text and is always unit-norm.
struct Exemplar {
  std::string query;
  std::string url;
  std::string title;
  std::string description;
  int rank = 1;
  Eigen::VectorXd embedding;
};

/// Every pipeline hyperparameter in one place. Defaults are usable as-is
/// with the reference embedder and the simulated search engine.
struct PipelineConfig {
  int k_lib = 10;                  // results fetched per seed query
  int k_hit = 10;                  // relevance-filter window
  int k_aug = 5;                   // results harvested per expanded query
  double epsilon_dup = 0.95;       // dedup cosine threshold, in (0,1)
  double tau_q = 0.6;              // query-match threshold, in (0,1)
  int m = 4;                       // few-shot exemplar count
  double lambda = 0.7;             // MMR relevance/diversity weight, in [0,1]
  double gamma = 0.1;              // rank-weight strength; negative deflates
  int k_max = 5;                   // refinement budget (generator calls)
  double stagnation_delta = 0.01;  // minimum aggregate improvement
  int stagnation_window = 2;       // consecutive stalled iterations to stop
  bool stagnation_enabled = true;
  int dimension = 256;             // embedding dimension d
  int n_expand = 5;                // max queries emitted by Expand
  int workers = 1;                 // batch worker count

  /// Throws config-invalid naming the offending key.
  void validate() const;
};

void validate_page(const ProductPage& page);
void validate_snippet(const Snippet& snippet);
void validate_exemplar(const Exemplar& exemplar, int expected_dimension);

/// Pointer to the value of the named attribute, or nullptr.
const std::string* find_attribute(const ProductPage& page, std::string_view name);

/// Content identity of an exemplar, used for deterministic tie-breaking.
/// (query, url) pairs are unique within a library.
std::string exemplar_id(const Exemplar& exemplar);

}  // namespace metasynth
