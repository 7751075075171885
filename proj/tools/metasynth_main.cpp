// Command-line surface for the MetaSynth pipeline: offline library
// construction, online snippet generation and the ranking-metrics harness.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "metasynth/config.hpp"
#include "metasynth/errors.hpp"
#include "metasynth/library.hpp"
#include "metasynth/metrics.hpp"
#include "metasynth/pipeline.hpp"

namespace {

using namespace metasynth;

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& warning : warnings) {
    std::cerr << "warning: " << warning << '\n';
  }
}

int cmd_build_library(const std::string& seeds_path, const std::string& config_path,
                      const std::string& out_path) {
  std::vector<std::string> warnings;
  const AppConfig config = load_config(config_path, &warnings);
  print_warnings(warnings);

  auto provider = make_embedding_provider(config);
  auto search = make_search_client(config, provider);
  const std::vector<std::string> seeds = load_seed_queries(seeds_path);

  ExemplarLibrary library(provider, config.pipeline.epsilon_dup);
  const BuildStats stats = build_library(library, seeds, *search, config.pipeline);
  library.save(out_path);

  std::cout << "seeds: " << seeds.size() << "\nfetched: " << stats.fetched
            << "\nstored: " << stats.stored << "\ndeduped: " << stats.duplicates
            << "\nskipped_queries: " << stats.skipped_queries.size() << '\n';
  for (const auto& [query, reason] : stats.skipped_queries) {
    std::cerr << "skipped query '" << query << "': " << reason << '\n';
  }
  std::cout << "library written to " << out_path << '\n';
  return 0;
}

int cmd_generate(const std::string& pages_path, const std::string& library_path,
                 const std::string& config_path, const std::string& out_dir,
                 bool freeze_library) {
  std::vector<std::string> warnings;
  const AppConfig config = load_config(config_path, &warnings);
  print_warnings(warnings);

  if (!std::filesystem::exists(library_path)) {
    throw Error(Errc::library_not_found, "no library file at " + library_path);
  }
  auto provider = make_embedding_provider(config);
  auto search = make_search_client(config, provider);
  auto generator = make_generator_client(config);

  ExemplarLibrary library = ExemplarLibrary::load(library_path, provider);
  const std::vector<ProductPage> pages = load_pages(pages_path);

  const BatchOutcome outcome =
      run_batch(pages, library, *search, *generator, config, out_dir);

  if (!freeze_library && outcome.augmented > 0) {
    library.save(library_path);
    std::cout << "library updated with " << outcome.augmented << " exemplars\n";
  }

  std::cout << "pages: " << pages.size() << "\nok: " << outcome.ok
            << "\naccepted: " << outcome.accepted << "\nfailed: " << outcome.failed << '\n';
  for (const auto& [page_id, message] : outcome.failures) {
    std::cerr << "page " << page_id << " failed: " << message << '\n';
  }
  if (outcome.failed == 0) return 0;
  return outcome.ok > 0 ? 2 : 1;
}

int cmd_judge_metrics(const std::string& rankings_path, const std::string& out_path,
                      const std::string& config_path) {
  NdcgGain gain = NdcgGain::exponential;
  if (!config_path.empty()) {
    std::vector<std::string> warnings;
    gain = load_config(config_path, &warnings).ndcg_gain;
    print_warnings(warnings);
  }
  const std::vector<JudgedItem> items = load_judged_items(rankings_path);
  const MetricsTable table = compare_methods(items, gain);

  std::ofstream out(out_path);
  if (!out) {
    throw Error(Errc::io_error, "cannot write report to " + out_path);
  }
  out << metrics_report_json(table) << '\n';
  std::cout << format_metrics_table(table);
  return 0;
}

int cmd_config_show(const std::string& config_path) {
  std::vector<std::string> warnings;
  const AppConfig config = load_config(config_path, &warnings);
  print_warnings(warnings);
  std::cout << effective_config_json(config) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MetaSynth: exemplar-guided meta title/description generation"};
  app.require_subcommand(1);

  std::string seeds_path, config_path, out_path;
  auto* build = app.add_subcommand("build-library", "Harvest seed queries into a library");
  build->add_option("--seeds", seeds_path, "Seed query file, one query per line")->required();
  build->add_option("--config", config_path, "Pipeline config JSON")->required();
  build->add_option("--out", out_path, "Output library JSONL")->required();

  std::string pages_path, library_path, gen_out_dir;
  bool freeze_library = false;
  auto* generate = app.add_subcommand("generate", "Generate snippets for pages");
  generate->add_option("--page", pages_path, "Page JSON file or directory")->required();
  generate->add_option("--library", library_path, "Library JSONL")->required();
  generate->add_option("--config", config_path, "Pipeline config JSON")->required();
  generate->add_option("--out", gen_out_dir, "Output directory")->required();
  generate->add_flag("--freeze-library", freeze_library,
                     "Do not write augmented exemplars back to the library file");

  std::string rankings_path, report_path, metrics_config;
  auto* judge = app.add_subcommand("judge-metrics", "Aggregate judged rankings");
  judge->add_option("--rankings", rankings_path, "Judged rankings JSONL")->required();
  judge->add_option("--out", report_path, "Report JSON path")->required();
  judge->add_option("--config", metrics_config, "Optional config (ndcg_gain)");

  auto* show = app.add_subcommand("config", "Config utilities");
  auto* show_sub = show->add_subcommand("show", "Print the effective config");
  show_sub->add_option("--config", config_path, "Pipeline config JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) return cmd_build_library(seeds_path, config_path, out_path);
    if (generate->parsed()) {
      return cmd_generate(pages_path, library_path, config_path, gen_out_dir, freeze_library);
    }
    if (judge->parsed()) return cmd_judge_metrics(rankings_path, report_path, metrics_config);
    if (show->parsed() && show_sub->parsed()) return cmd_config_show(config_path);
  } catch (const metasynth::Error& error) {
    std::cerr << "error: " << error.what() << '\n';
    return metasynth::errc_exit_code(error.code());
  } catch (const std::exception& error) {
    std::cerr << "error: internal: " << error.what() << '\n';
    return 1;
  }
  std::cerr << "error: invalid-argument: no subcommand\n";
  return metasynth::errc_exit_code(metasynth::Errc::invalid_argument);
}
