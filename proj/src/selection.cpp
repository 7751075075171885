#include "metasynth/selection.hpp"

#include <algorithm>
#include <string>

#include "metasynth/errors.hpp"
#include "metasynth/similarity.hpp"

namespace metasynth {

namespace {

double combine(double relevance, double weight, double max_selected_sim, double lambda) {
  // Shared by mmr_score and the greedy loop so both walk the same
  // floating-point path.
  return lambda * weight * relevance - (1.0 - lambda) * max_selected_sim;
}

}  // namespace

double rank_weight(int rank, double gamma, int k_lib) {
  if (rank < 1) {
    throw Error(Errc::invalid_argument, "rank_weight: rank must be >= 1");
  }
  const double capped = static_cast<double>(std::min(rank, k_lib));
  const double span = static_cast<double>(std::max(k_lib - 1, 1));
  return 1.0 + gamma * (static_cast<double>(k_lib) - capped) / span;
}

double mmr_score(const Exemplar& candidate, const std::vector<Exemplar>& selected,
                 const Eigen::VectorXd& z_x, double lambda, double gamma, int k_lib) {
  if (lambda < 0.0 || lambda > 1.0) {
    throw Error(Errc::invalid_argument, "mmr_score: lambda must lie in [0,1]");
  }
  const double relevance = cosine_similarity(z_x, candidate.embedding);
  // True max over the selected set (cosines may be negative); the max over
  // an empty set is taken as 0 (standard MMR convention).
  double max_selected_sim = 0.0;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const double sim = cosine_similarity(candidate.embedding, selected[i].embedding);
    max_selected_sim = i == 0 ? sim : std::max(max_selected_sim, sim);
  }
  return combine(relevance, rank_weight(candidate.rank, gamma, k_lib),
                 max_selected_sim, lambda);
}

SelectionResult select_exemplars(const std::vector<Exemplar>& pool,
                                 const Eigen::VectorXd& z_x,
                                 const PipelineConfig& config) {
  if (config.lambda < 0.0 || config.lambda > 1.0) {
    throw Error(Errc::invalid_argument, "select_exemplars: lambda must lie in [0,1]");
  }
  if (config.m < 1) {
    throw Error(Errc::invalid_argument, "select_exemplars: m must be >= 1");
  }

  SelectionResult result;
  result.lambda = config.lambda;
  result.gamma = config.gamma;
  if (pool.empty()) return result;

  const std::size_t n = pool.size();
  std::vector<double> relevance(n);
  std::vector<double> weighted(n);
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    relevance[i] = cosine_similarity(z_x, pool[i].embedding);
    weighted[i] = rank_weight(pool[i].rank, config.gamma, config.k_lib);
    ids[i] = exemplar_id(pool[i]);
  }

  std::vector<bool> taken(n, false);
  // Max similarity of each candidate to the selected set so far; the true
  // max over an empty set is defined as 0.
  std::vector<double> max_sim(n, 0.0);

  const std::size_t steps = std::min<std::size_t>(static_cast<std::size_t>(config.m), n);
  for (std::size_t step = 0; step < steps; ++step) {
    std::size_t best = n;
    double best_score = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      const double score = combine(relevance[i], weighted[i], max_sim[i], config.lambda);
      if (best == n) {
        best = i;
        best_score = score;
        continue;
      }
      bool wins = false;
      if (score != best_score) {
        wins = score > best_score;
      } else if (relevance[i] != relevance[best]) {
        wins = relevance[i] > relevance[best];
      } else if (pool[i].rank != pool[best].rank) {
        wins = pool[i].rank < pool[best].rank;
      } else if (ids[i] != ids[best]) {
        wins = ids[i] < ids[best];
      }
      if (wins) {
        best = i;
        best_score = score;
      }
    }

    taken[best] = true;
    result.selected.push_back(best);
    result.step_scores.push_back(best_score);
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      const double sim = cosine_similarity(pool[i].embedding, pool[best].embedding);
      max_sim[i] = step == 0 ? sim : std::max(max_sim[i], sim);
    }
  }
  return result;
}

}  // namespace metasynth
