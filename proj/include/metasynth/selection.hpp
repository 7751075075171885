#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "metasynth/types.hpp"

namespace metasynth {

/// Greedy MMR selection output. `selected` holds positions into the input
/// pool in pick order; `step_scores` the argmax MMR value of each step.
struct SelectionResult {
  std::vector<std::size_t> selected;
  std::vector<double> step_scores;
  double lambda = 0.0;
  double gamma = 0.0;
};

/// Multiplier applied to the relevance term of an exemplar harvested at
/// `rank`: 1 + gamma * (K_lib - min(rank, K_lib)) / max(K_lib - 1, 1).
/// Non-increasing in rank for positive gamma (inflate better-ranked
/// writings), non-decreasing for negative gamma (deflate against popularity
/// bias), constant 1 when gamma is 0.
double rank_weight(int rank, double gamma, int k_lib);

/// Rank-weighted MMR value of `candidate` against the growing selected set:
///   lambda * w(r) * cos(z_x, e) - (1 - lambda) * max_{e' in selected} cos(e, e')
/// with the max term 0 for an empty selected set.
double mmr_score(const Exemplar& candidate, const std::vector<Exemplar>& selected,
                 const Eigen::VectorXd& z_x, double lambda, double gamma, int k_lib);

/// min(m, |pool|) greedy steps, each picking the unselected candidate with
/// the maximal MMR score. Ties break by higher raw relevance, then lower
/// rank, then lexicographic exemplar id, then pool position, so the outcome
/// is total and independent of pool shuffling.
SelectionResult select_exemplars(const std::vector<Exemplar>& pool,
                                 const Eigen::VectorXd& z_x,
                                 const PipelineConfig& config);

}  // namespace metasynth
