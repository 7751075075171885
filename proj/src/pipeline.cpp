#include "metasynth/pipeline.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "metasynth/errors.hpp"
#include "metasynth/selection.hpp"

namespace metasynth {

PreparedPage prepare_page(const ProductPage& page, ExemplarLibrary& library,
                          SearchClient& search, GeneratorClient& generator,
                          const AppConfig& config) {
  PreparedPage prepared;
  try {
    const QueryResolution resolution =
        resolve_queries(page, library, search, generator, config.pipeline);
    prepared.queries_used = resolution.query_texts();
    prepared.mode = resolution.mode == QueryResolution::Mode::matched ? "matched" : "expanded";
    prepared.augmented_count = resolution.augmented_count;

    const std::vector<Exemplar> pool = library.pool_for_queries(prepared.queries_used);
    const Eigen::VectorXd z_x = embed_page(library.embedder(), page);
    const SelectionResult selection = select_exemplars(pool, z_x, config.pipeline);
    for (std::size_t index : selection.selected) prepared.few_shot.push_back(pool[index]);
  } catch (const NoCoverageError&) {
    // No query demonstrably retrieves this page: generate zero-shot.
    prepared.mode = "zero-shot";
  }
  return prepared;
}

PageResult generate_for_page(const ProductPage& page, ExemplarLibrary& library,
                             SearchClient& search, GeneratorClient& generator,
                             const AppConfig& config) {
  const PreparedPage prepared = prepare_page(page, library, search, generator, config);

  PageResult result;
  result.page_id = page.page_id;
  result.queries_used = prepared.queries_used;
  result.mode = prepared.mode;
  result.augmented_count = prepared.augmented_count;
  result.exemplar_count = prepared.few_shot.size();
  result.trace = run_loop(page, prepared.few_shot, config.guardrails, config.pipeline,
                          config.evaluator, library.embedder(), generator);
  return result;
}

std::string page_result_json(const PageResult& result) {
  nlohmann::json iterations = nlohmann::json::array();
  for (const IterationRecord& record : result.trace.iterations) {
    nlohmann::json violations = nlohmann::json::array();
    for (const Violation& violation : record.scores.hard_violations) {
      violations.push_back(violation.phrase);
    }
    iterations.push_back({
        {"title", record.snippet.title},
        {"description", record.snippet.description},
        {"scores",
         {{"rel", record.scores.rel},
          {"promo", record.scores.promo},
          {"cta", record.scores.cta},
          {"brand", record.scores.brand}}},
        {"aggregate", record.aggregate},
        {"hard_violations", violations},
        {"missing_required", record.scores.missing_required},
        {"directives", record.feedback.consolidated},
    });
  }

  const Snippet& chosen = final_snippet(result.trace);
  nlohmann::json root = {
      {"page_id", result.page_id},
      {"snippet", {{"title", chosen.title}, {"description", chosen.description}}},
      {"stop_reason", stop_reason_name(result.trace.stop_reason)},
      {"iterations", iterations},
      {"queries_used", result.queries_used},
      {"mode", result.mode},
      {"augmented_count", result.augmented_count},
      {"exemplar_count", result.exemplar_count},
  };
  if (result.trace.accepted_index.has_value()) {
    root["accepted_index"] = *result.trace.accepted_index;
  }
  if (result.trace.error.has_value()) {
    root["error"] = *result.trace.error;
  }
  return root.dump(2);
}

BatchOutcome run_batch(const std::vector<ProductPage>& pages, ExemplarLibrary& library,
                       SearchClient& search, GeneratorClient& generator,
                       const AppConfig& config, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  BatchOutcome outcome;
  std::mutex library_mutex;  // single-writer contract around retrieval
  std::mutex outcome_mutex;
  std::atomic<std::size_t> cursor{0};

  auto process_pages = [&] {
    while (true) {
      const std::size_t index = cursor.fetch_add(1);
      if (index >= pages.size()) break;
      const ProductPage& page = pages[index];
      const std::string out_path =
          (std::filesystem::path(out_dir) / (page.page_id + ".json")).string();
      std::ofstream out(out_path);
      if (!out) {
        throw Error(Errc::io_error, "run_batch: cannot write " + out_path);
      }
      try {
        PreparedPage prepared;
        {
          std::lock_guard<std::mutex> lock(library_mutex);
          prepared = prepare_page(page, library, search, generator, config);
        }
        PageResult result;
        result.page_id = page.page_id;
        result.queries_used = prepared.queries_used;
        result.mode = prepared.mode;
        result.augmented_count = prepared.augmented_count;
        result.exemplar_count = prepared.few_shot.size();
        result.trace = run_loop(page, prepared.few_shot, config.guardrails, config.pipeline,
                                config.evaluator, library.embedder(), generator);
        out << page_result_json(result) << '\n';
        std::lock_guard<std::mutex> lock(outcome_mutex);
        ++outcome.ok;
        outcome.augmented += result.augmented_count;
        if (result.trace.stop_reason == StopReason::accepted) ++outcome.accepted;
      } catch (const Error& error) {
        nlohmann::json failure = {{"page_id", page.page_id},
                                  {"error", errc_name(error.code())},
                                  {"message", error.what()}};
        out << failure.dump(2) << '\n';
        std::lock_guard<std::mutex> lock(outcome_mutex);
        ++outcome.failed;
        outcome.failures.emplace_back(page.page_id, error.what());
      }
    }
  };

  const int workers = std::max(1, config.pipeline.workers);
  if (workers == 1 || pages.size() <= 1) {
    process_pages();
  } else {
    std::vector<std::thread> pool;
    const int count = std::min<int>(workers, static_cast<int>(pages.size()));
    pool.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) pool.emplace_back(process_pages);
    for (std::thread& worker : pool) worker.join();
  }
  return outcome;
}

}  // namespace metasynth
