#include "metasynth/refinement.hpp"

#include <algorithm>
#include <set>

#include "metasynth/errors.hpp"
#include "metasynth/similarity.hpp"
#include "metasynth/text.hpp"

namespace metasynth {

namespace {

// Fixed consolidation order, after severity and shortfall.
int criterion_order(const std::string& criterion) {
  if (criterion == "brand") return 0;
  if (criterion == "rel") return 1;
  if (criterion == "cta") return 2;
  return 3;  // promo
}

double threshold(const Guardrails& rails, const std::string& criterion) {
  auto it = rails.thresholds.find(criterion);
  return it == rails.thresholds.end() ? 1.0 : it->second;
}

/// First page attribute whose value is not yet mentioned in the snippet
/// (token containment), falling back to the first attribute.
std::string top_missing_attribute(const Snippet& snippet, const ProductPage& page) {
  if (page.attributes.empty()) return "name";
  const std::vector<std::string> tokens =
      tokenize(snippet.title + " " + snippet.description);
  for (const Attribute& attribute : page.attributes) {
    if (trim(attribute.value).empty()) continue;
    if (!contains_token_phrase(tokens, attribute.value)) return attribute.name;
  }
  return page.attributes.front().name;
}

}  // namespace

const char* stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::accepted: return "accepted";
    case StopReason::budget_exhausted: return "budget_exhausted";
    case StopReason::stagnated: return "stagnated";
    case StopReason::generation_error: return "generation_error";
  }
  return "unknown";
}

const Snippet& final_snippet(const RefinementTrace& trace) {
  if (trace.iterations.empty()) {
    throw Error(Errc::invalid_argument, "final_snippet: empty trace");
  }
  const std::size_t index = trace.accepted_index.value_or(trace.best_index);
  return trace.iterations.at(index).snippet;
}

const std::vector<std::string>& default_promo_lexicon() {
  static const std::vector<std::string> lexicon = {
      "shop", "save", "premium", "perfect", "discover", "upgrade", "exclusive", "stylish"};
  return lexicon;
}

const std::vector<std::string>& default_cta_phrases() {
  static const std::vector<std::string> phrases = {
      "buy now", "shop now", "order today", "discover", "explore"};
  return phrases;
}

EvaluatorSettings default_evaluator_settings() {
  return {default_promo_lexicon(), default_cta_phrases()};
}

double score_relevance(const Snippet& snippet, const ProductPage& page,
                       const EmbeddingProvider& provider) {
  return clamp01(cosine_similarity(embed_exemplar(provider, snippet.title, snippet.description),
                                   embed_page(provider, page)));
}

double score_promo(const Snippet& snippet, const std::vector<std::string>& lexicon) {
  const std::vector<std::string> tokens =
      tokenize(snippet.title + " " + snippet.description);
  int hits = 0;
  for (const std::string& term : lexicon) {
    if (contains_token_phrase(tokens, term)) ++hits;
  }
  return clamp01(static_cast<double>(hits) / 3.0);
}

int score_cta(const Snippet& snippet, const std::vector<std::string>& cta_phrases) {
  const std::vector<std::string> tokens =
      tokenize(snippet.title + " " + snippet.description);
  for (const std::string& phrase : cta_phrases) {
    if (contains_token_phrase(tokens, phrase)) return 1;
  }
  return 0;
}

double score_brand(const Snippet& snippet, const Guardrails& rails,
                   std::vector<Violation>* out_violations,
                   std::vector<std::string>* out_missing) {
  const std::string combined = concat_snippet(snippet.title, snippet.description);
  const std::vector<Violation> violations = scan_hard_constraints(combined, rails);
  const std::vector<std::string> missing = check_required_elements(snippet, rails);

  // A phrase matched twice is one broken rule: the denominator counts rules,
  // so the numerator counts distinct violated entries.
  std::set<std::string> distinct;
  for (const Violation& violation : violations) distinct.insert(violation.phrase);

  if (out_violations != nullptr) *out_violations = violations;
  if (out_missing != nullptr) *out_missing = missing;

  const std::size_t total = rails.hard_prohibitions.size() + rails.required_elements.size();
  if (total == 0) return 1.0;
  return clamp01(1.0 - static_cast<double>(distinct.size() + missing.size()) /
                           static_cast<double>(total));
}

double aggregate_score(const ScoreVector& scores) {
  return (scores.rel + scores.promo + static_cast<double>(scores.cta) + scores.brand) / 4.0;
}

bool passes(const ScoreVector& scores, const Guardrails& rails) {
  if (!scores.hard_violations.empty() || !scores.missing_required.empty()) return false;
  return scores.rel >= threshold(rails, "rel") && scores.promo >= threshold(rails, "promo") &&
         static_cast<double>(scores.cta) >= threshold(rails, "cta") &&
         scores.brand >= threshold(rails, "brand");
}

EvaluatorPanel make_builtin_panel(const EmbeddingProvider& provider,
                                  const EvaluatorSettings& settings) {
  EvaluatorPanel panel;
  panel.rel = [&provider](const Snippet& snippet, const ProductPage& page) {
    return score_relevance(snippet, page, provider);
  };
  panel.promo = [lexicon = settings.promo_lexicon](const Snippet& snippet) {
    return score_promo(snippet, lexicon);
  };
  panel.cta = [phrases = settings.cta_phrases](const Snippet& snippet) {
    return score_cta(snippet, phrases);
  };
  return panel;
}

std::pair<ScoreVector, Feedback> evaluate(const Snippet& snippet, const ProductPage& page,
                                          const Guardrails& rails,
                                          const EvaluatorSettings& settings,
                                          const EmbeddingProvider& provider,
                                          const EvaluatorPanel* panel) {
  const EvaluatorPanel builtin = make_builtin_panel(provider, settings);
  const EvaluatorPanel& active = panel != nullptr ? *panel : builtin;

  ScoreVector scores;
  Feedback feedback;

  auto scorer_failed = [&](const std::string& criterion) {
    feedback.items.push_back(
        {criterion, "retry criterion " + criterion, Severity::soft, 1.0});
  };

  bool rel_errored = false;
  try {
    scores.rel = clamp01(active.rel(snippet, page));
  } catch (const std::exception&) {
    scores.rel = 0.0;
    rel_errored = true;
  }
  bool promo_errored = false;
  try {
    scores.promo = clamp01(active.promo(snippet));
  } catch (const std::exception&) {
    scores.promo = 0.0;
    promo_errored = true;
  }
  bool cta_errored = false;
  try {
    scores.cta = active.cta(snippet) != 0 ? 1 : 0;
  } catch (const std::exception&) {
    scores.cta = 0;
    cta_errored = true;
  }
  scores.brand = score_brand(snippet, rails, &scores.hard_violations, &scores.missing_required);

  // One directive per hard violation / missing element, both blocking.
  std::set<std::string> seen_terms;
  for (const Violation& violation : scores.hard_violations) {
    if (!seen_terms.insert(violation.phrase).second) continue;
    feedback.items.push_back({"brand", "remove forbidden term " + violation.phrase,
                              Severity::hard, threshold(rails, "brand") - scores.brand});
  }
  for (const std::string& name : scores.missing_required) {
    feedback.items.push_back({"brand", "include required element " + name, Severity::hard,
                              threshold(rails, "brand") - scores.brand});
  }
  if (scores.brand < threshold(rails, "brand") && scores.hard_violations.empty() &&
      scores.missing_required.empty()) {
    // Unreachable with the built-in brand score, but a plugged-in scorer
    // could fail the threshold without concrete violations.
    feedback.items.push_back({"brand", "improve brand compliance", Severity::soft,
                              threshold(rails, "brand") - scores.brand});
  }

  if (rel_errored) {
    scorer_failed("rel");
  } else if (scores.rel < threshold(rails, "rel")) {
    feedback.items.push_back(
        {"rel", "increase relevance: mention " + top_missing_attribute(snippet, page),
         Severity::soft, threshold(rails, "rel") - scores.rel});
  }
  if (cta_errored) {
    scorer_failed("cta");
  } else if (static_cast<double>(scores.cta) < threshold(rails, "cta")) {
    feedback.items.push_back({"cta", "insert a call to action", Severity::soft,
                              threshold(rails, "cta") - static_cast<double>(scores.cta)});
  }
  if (promo_errored) {
    scorer_failed("promo");
  } else if (scores.promo < threshold(rails, "promo")) {
    feedback.items.push_back({"promo", "increase promotional strength", Severity::soft,
                              threshold(rails, "promo") - scores.promo});
  }

  feedback.consolidated = consolidate_feedback(feedback, scores, rails);
  return {scores, feedback};
}

std::vector<std::string> consolidate_feedback(const Feedback& feedback,
                                              const ScoreVector& scores,
                                              const Guardrails& rails) {
  (void)scores;
  (void)rails;
  std::vector<FeedbackItem> items = feedback.items;
  std::stable_sort(items.begin(), items.end(),
                   [](const FeedbackItem& a, const FeedbackItem& b) {
                     if (a.severity != b.severity) return a.severity == Severity::hard;
                     if (a.shortfall != b.shortfall) return a.shortfall > b.shortfall;
                     return criterion_order(a.criterion) < criterion_order(b.criterion);
                   });
  std::vector<std::string> directives;
  std::set<std::string> seen;
  for (const FeedbackItem& item : items) {
    if (seen.insert(item.directive).second) directives.push_back(item.directive);
  }
  return directives;
}

PromptParts assemble_prompt(const ProductPage& page, const std::vector<Exemplar>& exemplars,
                            const Guardrails& rails, const Snippet* previous,
                            const Feedback* feedback) {
  PromptParts parts;
  parts.push_back(
      {"task",
       "Write a search-engine meta title and meta description for the product page "
       "below. Respond with exactly two lines: 'TITLE: ...' then 'DESCRIPTION: ...'."});
  parts.push_back({"page", serialize_page(page)});

  std::string exemplar_body;
  if (exemplars.empty()) {
    exemplar_body = "none";
  } else {
    for (std::size_t i = 0; i < exemplars.size(); ++i) {
      if (i > 0) exemplar_body += '\n';
      exemplar_body += std::to_string(i + 1) + ". TITLE: " + exemplars[i].title +
                       "\n   DESCRIPTION: " + exemplars[i].description;
    }
  }
  parts.push_back({"exemplars", exemplar_body});

  std::string rails_body;
  for (const HardRule& rule : rails.hard_prohibitions) {
    rails_body += "avoid: " + rule.raw + '\n';
  }
  for (const RequiredElement& element : rails.required_elements) {
    rails_body += "require: " + element.name + " = ";
    if (element.pattern_text.has_value()) {
      rails_body += "re:" + *element.pattern_text;
    } else {
      for (std::size_t i = 0; i < element.phrases.size(); ++i) {
        if (i > 0) rails_body += " | ";
        rails_body += element.phrases[i];
      }
    }
    rails_body += '\n';
  }
  if (rails_body.empty()) rails_body = "none";
  while (!rails_body.empty() && rails_body.back() == '\n') rails_body.pop_back();
  parts.push_back({"guardrails", rails_body});

  if (previous != nullptr) {
    parts.push_back({"previous",
                     "TITLE: " + previous->title + "\nDESCRIPTION: " + previous->description});
  }
  if (feedback != nullptr) {
    std::string directives;
    for (std::size_t i = 0; i < feedback->consolidated.size(); ++i) {
      if (i > 0) directives += '\n';
      directives += "- " + feedback->consolidated[i];
    }
    parts.push_back({"feedback", directives});
  }
  return parts;
}

PromptParts assemble_expand_prompt(const ProductPage& page, int n_expand) {
  PromptParts parts;
  parts.push_back({"task", "Propose up to " + std::to_string(n_expand) +
                               " short search queries a shopper would type to find the "
                               "product below. One query per line, lowercase."});
  parts.push_back({"page", serialize_page(page)});
  return parts;
}

Snippet parse_snippet_completion(const std::string& completion) {
  std::string title;
  std::string description;
  std::size_t start = 0;
  while (start <= completion.size()) {
    std::size_t end = completion.find('\n', start);
    if (end == std::string::npos) end = completion.size();
    const std::string line = trim(completion.substr(start, end - start));
    if (title.empty() && find_ci(line, "TITLE:") == 0) {
      title = trim(strip_control_chars(line.substr(6)));
    } else if (description.empty() && find_ci(line, "DESCRIPTION:") == 0) {
      description = trim(strip_control_chars(line.substr(12)));
    }
    if (end == completion.size()) break;
    start = end + 1;
  }
  if (title.empty() || description.empty()) {
    throw Error(Errc::generation_format,
                "completion lacks non-empty TITLE: and DESCRIPTION: lines");
  }
  Snippet snippet{title, description};
  validate_snippet(snippet);
  return snippet;
}

namespace {

/// Sends the prompt, retrying once with a format reminder on a completion
/// that does not parse.
Snippet generate_with_retry(PromptParts prompt, GeneratorClient& generator) {
  try {
    return parse_snippet_completion(generator.send(prompt));
  } catch (const Error& error) {
    if (error.code() != Errc::generation_format) throw;
  }
  prompt.push_back({"format-reminder",
                    "Respond with exactly two lines: 'TITLE: ...' then 'DESCRIPTION: ...'."});
  return parse_snippet_completion(generator.send(prompt));
}

}  // namespace

Snippet generate_initial(const ProductPage& page, const std::vector<Exemplar>& exemplars,
                         const Guardrails& rails, GeneratorClient& generator) {
  return generate_with_retry(assemble_prompt(page, exemplars, rails), generator);
}

Snippet refine(const ProductPage& page, const std::vector<Exemplar>& exemplars,
               const Guardrails& rails, const Snippet& previous, const Feedback& feedback,
               GeneratorClient& generator) {
  if (feedback.consolidated.empty()) {
    throw Error(Errc::invalid_argument, "refine: feedback must be non-empty");
  }
  return generate_with_retry(assemble_prompt(page, exemplars, rails, &previous, &feedback),
                             generator);
}

RefinementTrace run_loop(const ProductPage& page, const std::vector<Exemplar>& exemplars,
                         const Guardrails& rails, const PipelineConfig& config,
                         const EvaluatorSettings& settings, const EmbeddingProvider& provider,
                         GeneratorClient& generator, const EvaluatorPanel* panel) {
  if (config.k_max < 1) {
    throw Error(Errc::invalid_argument, "run_loop: k_max must be >= 1");
  }

  RefinementTrace trace;
  auto update_best = [&trace]() {
    const IterationRecord& last = trace.iterations.back();
    if (trace.iterations.size() == 1 ||
        last.aggregate > trace.iterations[trace.best_index].aggregate) {
      trace.best_index = trace.iterations.size() - 1;
    }
  };

  Snippet current = generate_initial(page, exemplars, rails, generator);
  int stalled = 0;
  while (true) {
    auto [scores, feedback] = evaluate(current, page, rails, settings, provider, panel);
    IterationRecord record{current, scores, feedback, aggregate_score(scores)};
    trace.iterations.push_back(std::move(record));
    update_best();

    if (passes(trace.iterations.back().scores, rails)) {
      trace.stop_reason = StopReason::accepted;
      trace.accepted_index = trace.iterations.size() - 1;
      break;
    }
    if (config.stagnation_enabled && trace.iterations.size() >= 2) {
      const std::size_t t = trace.iterations.size() - 1;
      const double delta =
          trace.iterations[t].aggregate - trace.iterations[t - 1].aggregate;
      stalled = delta < config.stagnation_delta ? stalled + 1 : 0;
      if (stalled >= config.stagnation_window) {
        trace.stop_reason = StopReason::stagnated;
        break;
      }
    }
    if (trace.iterations.size() >= static_cast<std::size_t>(config.k_max)) {
      trace.stop_reason = StopReason::budget_exhausted;
      break;
    }

    try {
      current = refine(page, exemplars, rails, trace.iterations.back().snippet,
                       trace.iterations.back().feedback, generator);
    } catch (const Error& error) {
      if (error.code() != Errc::generation_format) throw;
      trace.stop_reason = StopReason::generation_error;
      trace.error = error.what();
      break;
    }
  }
  return trace;
}

}  // namespace metasynth
