#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "metasynth/library.hpp"
#include "metasynth/mock_generator.hpp"
#include "metasynth/refinement.hpp"
#include "metasynth/similarity.hpp"
#include "support/test_helpers.hpp"

using namespace metasynth;

namespace {

HashingEmbedder& embedder() {
  static HashingEmbedder instance;  // default d=256, what the alpha defaults assume
  return instance;
}

Guardrails rails_with(std::vector<std::string> hard,
                      std::vector<std::pair<std::string, std::vector<std::string>>> required) {
  Guardrails rails = default_guardrails();
  for (auto& entry : hard) rails.hard_prohibitions.push_back(make_hard_rule(entry));
  for (auto& [name, phrases] : required) {
    rails.required_elements.push_back(make_required_element(name, phrases));
  }
  return rails;
}

PipelineConfig loop_config(int k_max = 5) {
  PipelineConfig config;
  config.k_max = k_max;
  return config;
}

}  // namespace

TEST_CASE("score_relevance: snippet equal to the page text scores 1") {
  ProductPage page;
  page.page_id = "p";
  page.url = "https://a.com/p";
  page.attributes = {{"name", "Walnut Shelf"}};
  // concat of this snippet embeds the same tokens as "name: Walnut Shelf".
  const Snippet snippet{"name", "Walnut Shelf"};
  CHECK(score_relevance(snippet, page, embedder()) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("score_relevance: disjoint vocabulary scores low; clamp floors at 0") {
  const ProductPage page = testing::fixture_page();
  const Snippet snippet{"Quantum flux capacitor", "Tachyon polarity inverter housing."};
  const double score = score_relevance(snippet, page, embedder());
  CHECK(score < 0.2);
  CHECK(score >= 0.0);
  CHECK(clamp01(-0.05) == 0.0);
}

TEST_CASE("score_promo counts distinct lexicon hits over 3") {
  const auto& lexicon = default_promo_lexicon();
  CHECK(score_promo({"Plain mug", "A mug for coffee."}, lexicon) == 0.0);
  CHECK(score_promo({"Premium mug", "A mug for coffee."}, lexicon) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(score_promo({"Premium mug", "Save now and discover more."}, lexicon) == 1.0);
  CHECK(score_promo({"Premium premium mug", "Premium choice."}, lexicon) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));  // distinct terms, not occurrences
}

TEST_CASE("score_cta scans title and description") {
  const auto& phrases = default_cta_phrases();
  CHECK(score_cta({"Mug", "Great mug. Shop now!"}, phrases) == 1);
  CHECK(score_cta({"Buy now: the mug", "Plain text."}, phrases) == 1);
  CHECK(score_cta({"Mug", "Just a mug."}, phrases) == 0);
}

TEST_CASE("score_brand formula and outputs") {
  const Guardrails rails = rails_with({"guaranteed", "cheapest", "free money"},
                                      {{"cta", {"shop now"}}});
  std::vector<Violation> violations;
  std::vector<std::string> missing;

  // |H| + |R| = 4; one hard violation -> 0.75.
  const double one_bad =
      score_brand({"Guaranteed mug", "Great mug. Shop now."}, rails, &violations, &missing);
  CHECK(one_bad == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(violations.size() == 1);
  CHECK(missing.empty());

  // All clean -> 1.0.
  CHECK(score_brand({"Mug", "Great mug. Shop now."}, rails, &violations, &missing) == 1.0);

  // All required missing, no hard rules: |H|=0, |R|=2 -> 0.0.
  const Guardrails only_required =
      rails_with({}, {{"cta", {"shop now"}}, {"brand", {"Acme"}}});
  CHECK(score_brand({"Mug", "Plain."}, only_required, &violations, &missing) == 0.0);
  CHECK(missing.size() == 2);
}

TEST_CASE("evaluate: passing snippet has empty consolidated feedback") {
  const ProductPage page = testing::fixture_page();
  const Guardrails rails = rails_with({"guaranteed"}, {{"cta", {"shop now"}}});
  const Snippet snippet{"Acme Red Ceramic Mug",
                        "Dishwasher safe ceramic mug for coffee lovers. Premium pick, save "
                        "today. Shop now."};
  const auto [scores, feedback] =
      evaluate(snippet, page, rails, default_evaluator_settings(), embedder());
  CHECK(passes(scores, rails));
  CHECK(feedback.consolidated.empty());
}

TEST_CASE("evaluate: missing CTA yields exactly one directive") {
  const ProductPage page = testing::fixture_page();
  const Guardrails rails = default_guardrails();
  const Snippet snippet{"Acme Red Ceramic Mug",
                        "Dishwasher safe ceramic mug for coffee lovers. Premium pick, save "
                        "today, exclusive design."};
  const auto [scores, feedback] =
      evaluate(snippet, page, rails, default_evaluator_settings(), embedder());
  REQUIRE(feedback.consolidated.size() == 1);
  CHECK(feedback.consolidated[0] == "insert a call to action");
}

TEST_CASE("evaluate: forbidden term produces the hard directive verbatim") {
  const ProductPage page = testing::fixture_page();
  const Guardrails rails = rails_with({"guaranteed"}, {});
  const Snippet snippet{"Guaranteed best mug",
                        "Dishwasher safe ceramic mug. Premium, save, exclusive. Shop now."};
  const auto [scores, feedback] =
      evaluate(snippet, page, rails, default_evaluator_settings(), embedder());
  REQUIRE_FALSE(scores.hard_violations.empty());
  bool found = false;
  for (const std::string& directive : feedback.consolidated) {
    if (directive == "remove forbidden term guaranteed") found = true;
  }
  CHECK(found);
  CHECK_FALSE(passes(scores, rails));
}

TEST_CASE("evaluate: every failing criterion contributes a directive") {
  const ProductPage page = testing::fixture_page();
  const Guardrails rails = rails_with({"guaranteed"}, {{"brand", {"Acme"}}});
  const Snippet snippet{"Guaranteed widget", "Totally unrelated words without promotion."};
  const auto [scores, feedback] =
      evaluate(snippet, page, rails, default_evaluator_settings(), embedder());

  std::set<std::string> criteria;
  for (const FeedbackItem& item : feedback.items) criteria.insert(item.criterion);
  CHECK(criteria.count("brand") == 1);
  CHECK(criteria.count("rel") == 1);
  CHECK(criteria.count("cta") == 1);
  CHECK(criteria.count("promo") == 1);
  // Failing rel names a concrete attribute to mention.
  bool has_mention = false;
  for (const FeedbackItem& item : feedback.items) {
    if (item.criterion == "rel") {
      CHECK(item.directive.rfind("increase relevance: mention ", 0) == 0);
      has_mention = true;
    }
  }
  CHECK(has_mention);
}

TEST_CASE("a throwing panel scorer becomes a retry directive, not a crash") {
  const ProductPage page = testing::fixture_page();
  const Guardrails rails = default_guardrails();
  EvaluatorPanel panel = make_builtin_panel(embedder(), default_evaluator_settings());
  panel.promo = [](const Snippet&) -> double { throw std::runtime_error("backend down"); };
  const Snippet snippet{"Acme Mug", "Nice mug. Shop now."};
  const auto [scores, feedback] =
      evaluate(snippet, page, rails, default_evaluator_settings(), embedder(), &panel);
  CHECK(scores.promo == 0.0);
  bool retry = false;
  for (const std::string& directive : feedback.consolidated) {
    if (directive == "retry criterion promo") retry = true;
  }
  CHECK(retry);
}

TEST_CASE("consolidate_feedback orders hard first, then shortfall, then criterion") {
  Feedback feedback;
  feedback.items.push_back({"promo", "increase promotional strength", Severity::soft, 0.1});
  feedback.items.push_back({"brand", "remove forbidden term x", Severity::hard, 0.2});
  feedback.items.push_back({"rel", "increase relevance: mention name", Severity::soft, 0.4});
  ScoreVector scores;
  const auto directives = consolidate_feedback(feedback, scores, default_guardrails());
  REQUIRE(directives.size() == 3);
  CHECK(directives[0] == "remove forbidden term x");
  CHECK(directives[1] == "increase relevance: mention name");
  CHECK(directives[2] == "increase promotional strength");
}

TEST_CASE("consolidate_feedback ties break by fixed criterion order and dedupe") {
  Feedback feedback;
  feedback.items.push_back({"promo", "same directive", Severity::soft, 0.3});
  feedback.items.push_back({"cta", "insert a call to action", Severity::soft, 0.3});
  feedback.items.push_back({"rel", "same directive", Severity::soft, 0.3});
  ScoreVector scores;
  const auto directives = consolidate_feedback(feedback, scores, default_guardrails());
  REQUIRE(directives.size() == 2);
  CHECK(directives[0] == "same directive");          // rel outranks cta/promo at equal shortfall
  CHECK(directives[1] == "insert a call to action");
}

TEST_CASE("assemble_prompt emits fixed sections in order") {
  const ProductPage page = testing::fixture_page();
  const Guardrails rails = rails_with({"guaranteed"}, {{"cta", {"shop now", "buy now"}}});

  SUBCASE("zero-shot: exemplar section reads none") {
    const PromptParts parts = assemble_prompt(page, {}, rails);
    REQUIRE(parts.size() == 4);
    CHECK(parts[0].label == "task");
    CHECK(parts[1].label == "page");
    CHECK(parts[2].label == "exemplars");
    CHECK(parts[2].body == "none");
    CHECK(parts[3].label == "guardrails");
    CHECK(parts[3].body == "avoid: guaranteed\nrequire: cta = shop now | buy now");
  }

  SUBCASE("two exemplars appear numbered in order") {
    std::vector<Exemplar> exemplars;
    exemplars.push_back(make_exemplar(embedder(), "q", "https://a.com/1", "First Title",
                                      "First description.", 1));
    exemplars.push_back(make_exemplar(embedder(), "q", "https://a.com/2", "Second Title",
                                      "Second description.", 2));
    const PromptParts parts = assemble_prompt(page, exemplars, rails);
    const std::string* body = find_section(parts, "exemplars");
    REQUIRE(body != nullptr);
    CHECK(*body ==
          "1. TITLE: First Title\n   DESCRIPTION: First description.\n"
          "2. TITLE: Second Title\n   DESCRIPTION: Second description.");
  }

  SUBCASE("refinement carries previous snippet and directives verbatim") {
    const Snippet previous{"Old Title", "Old description."};
    Feedback feedback;
    feedback.consolidated = {"insert a call to action", "increase promotional strength"};
    const PromptParts parts = assemble_prompt(page, {}, rails, &previous, &feedback);
    REQUIRE(parts.size() == 6);
    CHECK(parts[4].label == "previous");
    CHECK(parts[4].body == "TITLE: Old Title\nDESCRIPTION: Old description.");
    CHECK(parts[5].label == "feedback");
    CHECK(parts[5].body == "- insert a call to action\n- increase promotional strength");
  }
}

TEST_CASE("parse_snippet_completion handles labels and rejects garbage") {
  const Snippet ok = parse_snippet_completion("TITLE: A Mug\nDESCRIPTION: Great mug.");
  CHECK(ok.title == "A Mug");
  CHECK(ok.description == "Great mug.");

  const Snippet spaced = parse_snippet_completion("noise\n  title: X \n Description:  Y  \n");
  CHECK(spaced.title == "X");
  CHECK(spaced.description == "Y");

  CHECK_THROWS_AS(parse_snippet_completion("no labels here"), Error);
  CHECK_THROWS_AS(parse_snippet_completion("TITLE: only a title"), Error);
  CHECK_THROWS_AS(parse_snippet_completion("TITLE: \nDESCRIPTION: x"), Error);
}

TEST_CASE("generate_initial retries once on malformed output") {
  const ProductPage page = testing::fixture_page();
  const Guardrails rails = default_guardrails();

  testing::ScriptedGenerator flaky({"not parseable", "TITLE: A\nDESCRIPTION: B"});
  const Snippet snippet = generate_initial(page, {}, rails, flaky);
  CHECK(snippet.title == "A");
  CHECK(flaky.calls() == 2);

  testing::ScriptedGenerator broken({"nope", "still nope", "TITLE: A\nDESCRIPTION: B"});
  try {
    generate_initial(page, {}, rails, broken);
    FAIL("expected generation-format");
  } catch (const Error& error) {
    CHECK(error.code() == Errc::generation_format);
  }
  CHECK(broken.calls() == 2);  // one reprompt only
}

TEST_CASE("refine requires non-empty feedback") {
  const ProductPage page = testing::fixture_page();
  testing::ScriptedGenerator gen({"TITLE: A\nDESCRIPTION: B"});
  Feedback empty;
  CHECK_THROWS_AS(refine(page, {}, default_guardrails(), {"T", "D"}, empty, gen), Error);
}

TEST_CASE("run_loop accepts immediately when the mock satisfies everything") {
  const ProductPage page = testing::fixture_page();
  const Guardrails rails = default_guardrails();
  testing::ScriptedGenerator gen(
      {"TITLE: Acme Red Ceramic Mug\n"
       "DESCRIPTION: Dishwasher safe ceramic mug for coffee lovers. Premium pick, save "
       "today. Shop now."});
  const RefinementTrace trace = run_loop(page, {}, rails, loop_config(),
                                         default_evaluator_settings(), embedder(), gen);
  CHECK(trace.stop_reason == StopReason::accepted);
  CHECK(trace.iterations.size() == 1);
  CHECK(trace.accepted_index == 0);
  CHECK(final_snippet(trace).title == "Acme Red Ceramic Mug");
}

TEST_CASE("run_loop accepts at t=1 when the mock adds the missing CTA on direction") {
  const ProductPage page = testing::fixture_page();
  const Guardrails rails = default_guardrails();
  MockGeneratorClient mock;

  // Feed the loop an exemplar whose text carries promo terms, so the mock's
  // initial generation passes promo but lacks nothing else except what the
  // script withholds. Build a scripted two-step instead: first output lacks
  // a CTA, second adds it.
  testing::ScriptedGenerator gen(
      {"TITLE: Acme Red Ceramic Mug\n"
       "DESCRIPTION: Dishwasher safe ceramic mug for coffee lovers. Premium pick, save today.",
       "TITLE: Acme Red Ceramic Mug\n"
       "DESCRIPTION: Dishwasher safe ceramic mug for coffee lovers. Premium pick, save "
       "today. Shop now."});
  const RefinementTrace trace = run_loop(page, {}, rails, loop_config(),
                                         default_evaluator_settings(), embedder(), gen);
  CHECK(trace.stop_reason == StopReason::accepted);
  CHECK(trace.iterations.size() == 2);
  CHECK(trace.accepted_index == 1);
  CHECK(trace.iterations[0].feedback.consolidated ==
        std::vector<std::string>{"insert a call to action"});
}

TEST_CASE("run_loop stagnates when the generator never changes its output") {
  const ProductPage page = testing::fixture_page();
  const Guardrails rails = default_guardrails();
  // Always the same snippet, which fails promo, so it never accepts.
  testing::ScriptedGenerator gen(
      {"TITLE: Acme Red Ceramic Mug\n"
       "DESCRIPTION: Dishwasher safe ceramic mug for coffee lovers. Shop now."});
  PipelineConfig config = loop_config(5);
  config.stagnation_window = 2;
  const RefinementTrace trace = run_loop(page, {}, rails, config,
                                         default_evaluator_settings(), embedder(), gen);
  CHECK(trace.stop_reason == StopReason::stagnated);
  CHECK(trace.iterations.size() == 3);  // t=0,1,2: two consecutive zero deltas

  // With the stagnation rule disabled, the same scenario burns the budget.
  config.stagnation_enabled = false;
  testing::ScriptedGenerator gen2(
      {"TITLE: Acme Red Ceramic Mug\n"
       "DESCRIPTION: Dishwasher safe ceramic mug for coffee lovers. Shop now."});
  const RefinementTrace full = run_loop(page, {}, rails, config,
                                        default_evaluator_settings(), embedder(), gen2);
  CHECK(full.stop_reason == StopReason::budget_exhausted);
  CHECK(full.iterations.size() == 5);
}

TEST_CASE("run_loop records a mid-loop generation error in the trace") {
  const ProductPage page = testing::fixture_page();
  const Guardrails rails = default_guardrails();
  testing::ScriptedGenerator gen(
      {"TITLE: Acme Mug\nDESCRIPTION: Plain factual mug text.", "garbage", "garbage"});
  const RefinementTrace trace = run_loop(page, {}, rails, loop_config(),
                                         default_evaluator_settings(), embedder(), gen);
  CHECK(trace.stop_reason == StopReason::generation_error);
  CHECK(trace.iterations.size() == 1);
  REQUIRE(trace.error.has_value());
  CHECK(final_snippet(trace).title == "Acme Mug");  // best iterate still available
}

TEST_CASE("run_loop budget, soundness and best-iterate bookkeeping") {
  const ProductPage page = testing::fixture_page();
  const Guardrails rails = rails_with({"guaranteed"}, {{"cta", {"shop now"}}});
  PipelineConfig config = loop_config(4);
  config.stagnation_enabled = false;

  // Improves a little each round but never supplies the required CTA, so it
  // can never be accepted.
  testing::ScriptedGenerator gen({
      "TITLE: Mug\nDESCRIPTION: Dishwasher safe ceramic mug for coffee lovers.",
      "TITLE: Mug\nDESCRIPTION: Dishwasher safe ceramic mug for coffee lovers. Premium.",
      "TITLE: Mug\nDESCRIPTION: Dishwasher safe ceramic mug for coffee lovers. Premium. Perfect.",
      "TITLE: Mug\nDESCRIPTION: Dishwasher safe ceramic mug for coffee lovers. Premium. Perfect. Stylish.",
  });
  const RefinementTrace trace = run_loop(page, {}, rails, config,
                                         default_evaluator_settings(), embedder(), gen);
  CHECK(trace.iterations.size() <= 4);
  CHECK(gen.calls() <= 4);
  CHECK_FALSE(trace.accepted_index.has_value());

  // Running max of aggregates is non-decreasing and best_index tracks it.
  double running = -1.0;
  for (const IterationRecord& record : trace.iterations) {
    running = std::max(running, record.aggregate);
    CHECK(running >= record.aggregate - 1e-12);
  }
  CHECK(trace.iterations[trace.best_index].aggregate == doctest::Approx(running));

  // Acceptance soundness: accepted traces re-evaluate as passing.
  testing::ScriptedGenerator good(
      {"TITLE: Acme Red Ceramic Mug\n"
       "DESCRIPTION: Dishwasher safe ceramic mug for coffee lovers. Premium pick, save "
       "today. Shop now."});
  const RefinementTrace accepted = run_loop(page, {}, rails, config,
                                            default_evaluator_settings(), embedder(), good);
  REQUIRE(accepted.stop_reason == StopReason::accepted);
  const auto [rescored, refeedback] = evaluate(final_snippet(accepted), page, rails,
                                               default_evaluator_settings(), embedder());
  CHECK(passes(rescored, rails));
}

TEST_CASE("directive fidelity: every failing criterion appears in c(t)") {
  const ProductPage page = testing::fixture_page();
  const Guardrails rails = rails_with({"guaranteed"}, {{"cta", {"shop now"}}});
  PipelineConfig config = loop_config(3);
  config.stagnation_enabled = false;
  testing::ScriptedGenerator gen(
      {"TITLE: Guaranteed gadget\nDESCRIPTION: Words with no relation to mugs at all."});
  const RefinementTrace trace = run_loop(page, {}, rails, config,
                                         default_evaluator_settings(), embedder(), gen);
  for (const IterationRecord& record : trace.iterations) {
    const auto alpha = rails.thresholds;
    auto has_criterion = [&](const std::string& name) {
      for (const FeedbackItem& item : record.feedback.items) {
        if (item.criterion == name) return true;
      }
      return false;
    };
    if (record.scores.rel < alpha.at("rel")) CHECK(has_criterion("rel"));
    if (record.scores.promo < alpha.at("promo")) CHECK(has_criterion("promo"));
    if (record.scores.cta < alpha.at("cta")) CHECK(has_criterion("cta"));
    if (!record.scores.hard_violations.empty() || !record.scores.missing_required.empty()) {
      CHECK(has_criterion("brand"));
    }
  }
}
