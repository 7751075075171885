#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "metasynth/clients.hpp"
#include "metasynth/embedding.hpp"
#include "metasynth/guardrails.hpp"
#include "metasynth/types.hpp"

namespace metasynth {

/// Per-candidate evaluation: the four criterion scores plus the raw hard
/// violations and missing required elements feeding the brand score. A
/// non-empty hard_violations list blocks acceptance no matter the scores.
struct ScoreVector {
  double rel = 0.0;    // in [0,1]
  double promo = 0.0;  // in [0,1]
  int cta = 0;         // {0,1}
  double brand = 0.0;  // in [0,1]
  std::vector<Violation> hard_violations;
  std::vector<std::string> missing_required;
};

enum class Severity { hard, soft };

struct FeedbackItem {
  std::string criterion;  // rel | promo | cta | brand
  std::string directive;
  Severity severity = Severity::soft;
  double shortfall = 0.0;  // alpha_k - s_k of the owning criterion
};

struct Feedback {
  std::vector<FeedbackItem> items;
  std::vector<std::string> consolidated;  // ordered, deduplicated directives

  bool empty() const { return items.empty(); }
};

enum class StopReason { accepted, budget_exhausted, stagnated, generation_error };

const char* stop_reason_name(StopReason reason);

struct IterationRecord {
  Snippet snippet;
  ScoreVector scores;
  Feedback feedback;
  double aggregate = 0.0;
};

/// The refinement loop transcript: one record per evaluated iterate.
struct RefinementTrace {
  std::vector<IterationRecord> iterations;
  StopReason stop_reason = StopReason::budget_exhausted;
  std::optional<std::size_t> accepted_index;
  std::size_t best_index = 0;  // argmax aggregate, ties earliest
  std::optional<std::string> error;
};

/// Accepted iterate when there is one, otherwise the best by aggregate.
const Snippet& final_snippet(const RefinementTrace& trace);

/// Lexicons driving the deterministic promo / CTA evaluators.
struct EvaluatorSettings {
  std::vector<std::string> promo_lexicon;
  std::vector<std::string> cta_phrases;
};

EvaluatorSettings default_evaluator_settings();
const std::vector<std::string>& default_promo_lexicon();
const std::vector<std::string>& default_cta_phrases();

/// Criterion scorer hooks. Defaults are the deterministic built-ins; an
/// LLM-backed scorer can be dropped in per criterion as long as it returns
/// a value in [0,1]. Brand scoring stays built-in (it is pure guardrail
/// bookkeeping).
struct EvaluatorPanel {
  std::function<double(const Snippet&, const ProductPage&)> rel;
  std::function<double(const Snippet&)> promo;
  std::function<int(const Snippet&)> cta;
};

EvaluatorPanel make_builtin_panel(const EmbeddingProvider& provider,
                                  const EvaluatorSettings& settings);

// Built-in criterion scorers.
double score_relevance(const Snippet& snippet, const ProductPage& page,
                       const EmbeddingProvider& provider);
double score_promo(const Snippet& snippet, const std::vector<std::string>& lexicon);
int score_cta(const Snippet& snippet, const std::vector<std::string>& cta_phrases);
double score_brand(const Snippet& snippet, const Guardrails& rails,
                   std::vector<Violation>* out_violations,
                   std::vector<std::string>* out_missing);

double aggregate_score(const ScoreVector& scores);
bool passes(const ScoreVector& scores, const Guardrails& rails);

/// Runs the evaluator panel, fills the score vector and derives one
/// directive per failing criterion.
std::pair<ScoreVector, Feedback> evaluate(const Snippet& snippet, const ProductPage& page,
                                          const Guardrails& rails,
                                          const EvaluatorSettings& settings,
                                          const EmbeddingProvider& provider,
                                          const EvaluatorPanel* panel = nullptr);

/// Orders directives hard-first, then by criterion shortfall descending,
/// then by the fixed criterion order brand, rel, cta, promo; deduplicates
/// verbatim repeats.
std::vector<std::string> consolidate_feedback(const Feedback& feedback,
                                              const ScoreVector& scores,
                                              const Guardrails& rails);

/// Fixed-order prompt sections: task, page, exemplars, guardrails and, when
/// refining, the previous snippet plus consolidated directives.
PromptParts assemble_prompt(const ProductPage& page, const std::vector<Exemplar>& exemplars,
                            const Guardrails& rails, const Snippet* previous = nullptr,
                            const Feedback* feedback = nullptr);

/// Expand prompt: task + page only.
PromptParts assemble_expand_prompt(const ProductPage& page, int n_expand);

/// Parses a completion in the two-line "TITLE: ... / DESCRIPTION: ..." wire
/// format. Throws generation-format when either line is missing or empty.
Snippet parse_snippet_completion(const std::string& completion);

Snippet generate_initial(const ProductPage& page, const std::vector<Exemplar>& exemplars,
                         const Guardrails& rails, GeneratorClient& generator);

Snippet refine(const ProductPage& page, const std::vector<Exemplar>& exemplars,
               const Guardrails& rails, const Snippet& previous, const Feedback& feedback,
               GeneratorClient& generator);

/// The evaluator-generator loop: generate, evaluate, stop on acceptance,
/// budget exhaustion or stagnation; otherwise consolidate feedback and
/// regenerate. Makes at most k_max generation calls.
RefinementTrace run_loop(const ProductPage& page, const std::vector<Exemplar>& exemplars,
                         const Guardrails& rails, const PipelineConfig& config,
                         const EvaluatorSettings& settings, const EmbeddingProvider& provider,
                         GeneratorClient& generator, const EvaluatorPanel* panel = nullptr);

}  // namespace metasynth
