#pragma once

#include <map>
#include <string>
#include <vector>

#include "metasynth/embedding.hpp"
#include "metasynth/guardrails.hpp"
#include "metasynth/refinement.hpp"
#include "metasynth/types.hpp"

namespace metasynth {

/// Gain schedule for per-item NDCG. Exponential is the default; linear is a
/// documented alternate kept behind this switch.
enum class NdcgGain { exponential, linear };

struct JudgedVariant {
  std::string method;
  Snippet snippet;
};

/// One judged item: the competing methods' snippets and the judge's ranking
/// of them (a bijection method -> rank in 1..n, 1 = best).
struct JudgedItem {
  std::string item_id;
  std::vector<JudgedVariant> variants;
  std::map<std::string, int> ranking;
};

struct MethodMetrics {
  double ndcg = 0.0;
  double mrr = 0.0;
  double avg_rank = 0.0;
};

struct MetricsTable {
  std::map<std::string, MethodMetrics> per_method;
  std::size_t item_count = 0;
};

/// Per-item NDCG of the method ranked `rank` among n: with one output per
/// method the DCG position is 1 and NDCG reduces to the normalized gain
/// (2^(n-rank) - 1) / (2^(n-1) - 1), or (n-rank)/(n-1) with linear gains.
double ndcg_for_item(int rank, int n, NdcgGain gain = NdcgGain::exponential);

/// Mean of 1/rank.
double mrr(const std::vector<int>& ranks);

/// Arithmetic mean of ranks.
double average_rank(const std::vector<int>& ranks);

/// Per-method means of the three metrics over all items. Every item must
/// rank the same method set; violations name the offending item.
MetricsTable compare_methods(const std::vector<JudgedItem>& items,
                             NdcgGain gain = NdcgGain::exponential);

/// Judge contract: produce a ranking (bijection onto 1..n) of an item's
/// variants.
class Judge {
 public:
  virtual ~Judge() = default;
  virtual std::map<std::string, int> rank(const JudgedItem& item) = 0;
};

/// Deterministic judge ranking variants by the built-in aggregate evaluator
/// score for the item's page, ties by method name. Lets the whole harness
/// run without an LLM.
class MockJudge final : public Judge {
 public:
  MockJudge(std::map<std::string, ProductPage> pages, Guardrails rails,
            EvaluatorSettings settings, std::shared_ptr<const EmbeddingProvider> provider);

  std::map<std::string, int> rank(const JudgedItem& item) override;

 private:
  std::map<std::string, ProductPage> pages_;
  Guardrails rails_;
  EvaluatorSettings settings_;
  std::shared_ptr<const EmbeddingProvider> provider_;
};

// Judged-rankings JSONL and report serialization.
std::vector<JudgedItem> load_judged_items(const std::string& path);
void save_judged_items(const std::vector<JudgedItem>& items, const std::string& path);
std::string metrics_report_json(const MetricsTable& table);
std::string format_metrics_table(const MetricsTable& table);

}  // namespace metasynth
