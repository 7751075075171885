#include "metasynth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "metasynth/errors.hpp"

namespace metasynth {

double ndcg_for_item(int rank, int n, NdcgGain gain) {
  if (n < 2) {
    throw Error(Errc::invalid_argument, "ndcg_for_item: need at least 2 methods");
  }
  if (rank < 1 || rank > n) {
    throw Error(Errc::invalid_argument, "ndcg_for_item: rank out of range");
  }
  const double graded = static_cast<double>(n - rank);
  if (gain == NdcgGain::linear) {
    return graded / static_cast<double>(n - 1);
  }
  return (std::exp2(graded) - 1.0) / (std::exp2(static_cast<double>(n - 1)) - 1.0);
}

double mrr(const std::vector<int>& ranks) {
  if (ranks.empty()) {
    throw Error(Errc::invalid_argument, "mrr: empty rank list");
  }
  double sum = 0.0;
  for (int rank : ranks) {
    if (rank < 1) throw Error(Errc::invalid_argument, "mrr: ranks must be >= 1");
    sum += 1.0 / static_cast<double>(rank);
  }
  return sum / static_cast<double>(ranks.size());
}

double average_rank(const std::vector<int>& ranks) {
  if (ranks.empty()) {
    throw Error(Errc::invalid_argument, "average_rank: empty rank list");
  }
  double sum = 0.0;
  for (int rank : ranks) sum += static_cast<double>(rank);
  return sum / static_cast<double>(ranks.size());
}

namespace {

void validate_item(const JudgedItem& item) {
  const std::size_t n = item.variants.size();
  if (n < 2) {
    throw Error(Errc::metrics_invalid, "item " + item.item_id + ": needs at least 2 variants");
  }
  if (item.ranking.size() != n) {
    throw Error(Errc::metrics_invalid,
                "item " + item.item_id + ": ranking size does not match variant count");
  }
  std::vector<bool> used(n, false);
  for (const JudgedVariant& variant : item.variants) {
    auto it = item.ranking.find(variant.method);
    if (it == item.ranking.end()) {
      throw Error(Errc::metrics_invalid,
                  "item " + item.item_id + ": no rank for method " + variant.method);
    }
    const int rank = it->second;
    if (rank < 1 || rank > static_cast<int>(n) || used[static_cast<std::size_t>(rank - 1)]) {
      throw Error(Errc::metrics_invalid,
                  "item " + item.item_id + ": ranking is not a bijection onto 1..n");
    }
    used[static_cast<std::size_t>(rank - 1)] = true;
  }
}

}  // namespace

MetricsTable compare_methods(const std::vector<JudgedItem>& items, NdcgGain gain) {
  if (items.empty()) {
    throw Error(Errc::metrics_invalid, "compare_methods: no judged items");
  }
  std::vector<std::string> methods;
  for (const JudgedVariant& variant : items.front().variants) {
    methods.push_back(variant.method);
  }
  std::sort(methods.begin(), methods.end());

  std::map<std::string, std::vector<int>> ranks_by_method;
  for (const JudgedItem& item : items) {
    validate_item(item);
    std::vector<std::string> item_methods;
    for (const JudgedVariant& variant : item.variants) item_methods.push_back(variant.method);
    std::sort(item_methods.begin(), item_methods.end());
    if (item_methods != methods) {
      throw Error(Errc::metrics_invalid,
                  "item " + item.item_id + ": method set differs from the first item");
    }
    for (const auto& [method, rank] : item.ranking) {
      ranks_by_method[method].push_back(rank);
    }
  }

  MetricsTable table;
  table.item_count = items.size();
  const int n = static_cast<int>(methods.size());
  for (const std::string& method : methods) {
    const std::vector<int>& ranks = ranks_by_method[method];
    MethodMetrics metrics;
    double ndcg_sum = 0.0;
    for (int rank : ranks) ndcg_sum += ndcg_for_item(rank, n, gain);
    metrics.ndcg = ndcg_sum / static_cast<double>(ranks.size());
    metrics.mrr = mrr(ranks);
    metrics.avg_rank = average_rank(ranks);
    table.per_method[method] = metrics;
  }
  return table;
}

MockJudge::MockJudge(std::map<std::string, ProductPage> pages, Guardrails rails,
                     EvaluatorSettings settings,
                     std::shared_ptr<const EmbeddingProvider> provider)
    : pages_(std::move(pages)),
      rails_(std::move(rails)),
      settings_(std::move(settings)),
      provider_(std::move(provider)) {}

std::map<std::string, int> MockJudge::rank(const JudgedItem& item) {
  auto page_it = pages_.find(item.item_id);
  if (page_it == pages_.end()) {
    throw Error(Errc::not_found, "mock judge: no page for item " + item.item_id);
  }
  std::vector<std::pair<double, std::string>> scored;
  for (const JudgedVariant& variant : item.variants) {
    const auto [scores, feedback] =
        evaluate(variant.snippet, page_it->second, rails_, settings_, *provider_);
    scored.emplace_back(aggregate_score(scores), variant.method);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::map<std::string, int> ranking;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    ranking[scored[i].second] = static_cast<int>(i + 1);
  }
  return ranking;
}

std::vector<JudgedItem> load_judged_items(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::io_error, "load_judged_items: cannot open " + path);
  }
  std::vector<JudgedItem> items;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      throw Error(Errc::load_failed,
                  path + ": malformed judged item at line " + std::to_string(line_number));
    }
    JudgedItem item;
    try {
      item.item_id = record.at("item_id").get<std::string>();
      for (const auto& entry : record.at("variants")) {
        JudgedVariant variant;
        variant.method = entry.at("method").get<std::string>();
        variant.snippet.title = entry.at("title").get<std::string>();
        variant.snippet.description = entry.at("description").get<std::string>();
        item.variants.push_back(std::move(variant));
      }
      for (const auto& [method, rank] : record.at("ranking").items()) {
        item.ranking[method] = rank.get<int>();
      }
    } catch (const nlohmann::json::exception& ex) {
      throw Error(Errc::load_failed, path + ": bad judged item at line " +
                                         std::to_string(line_number) + " (" + ex.what() + ")");
    }
    items.push_back(std::move(item));
  }
  return items;
}

void save_judged_items(const std::vector<JudgedItem>& items, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(Errc::io_error, "save_judged_items: cannot open " + path + " for writing");
  }
  for (const JudgedItem& item : items) {
    nlohmann::json variants = nlohmann::json::array();
    for (const JudgedVariant& variant : item.variants) {
      variants.push_back({{"method", variant.method},
                          {"title", variant.snippet.title},
                          {"description", variant.snippet.description}});
    }
    nlohmann::json record = {{"item_id", item.item_id},
                             {"variants", variants},
                             {"ranking", item.ranking}};
    out << record.dump() << '\n';
  }
}

std::string metrics_report_json(const MetricsTable& table) {
  nlohmann::json methods = nlohmann::json::object();
  for (const auto& [method, metrics] : table.per_method) {
    methods[method] = {{"ndcg", metrics.ndcg},
                       {"mrr", metrics.mrr},
                       {"avg_rank", metrics.avg_rank}};
  }
  nlohmann::json report = {{"items", table.item_count}, {"methods", methods}};
  return report.dump(2);
}

std::string format_metrics_table(const MetricsTable& table) {
  std::size_t width = 6;
  for (const auto& [method, metrics] : table.per_method) {
    width = std::max(width, method.size());
  }
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width + 2)) << "method" << std::right
      << std::setw(10) << "ndcg" << std::setw(10) << "mrr" << std::setw(10) << "avg_rank"
      << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& [method, metrics] : table.per_method) {
    out << std::left << std::setw(static_cast<int>(width + 2)) << method << std::right
        << std::setw(10) << metrics.ndcg << std::setw(10) << metrics.mrr << std::setw(10)
        << metrics.avg_rank << '\n';
  }
  out << "items: " << table.item_count << '\n';
  return out.str();
}

}  // namespace metasynth
