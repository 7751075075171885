#pragma once

#include <Eigen/Dense>
#include <string>

#include "metasynth/errors.hpp"

namespace metasynth {

/// Cosine similarity between two dense vector expressions of equal size.
/// Under the unit-norm invariant this reduces to the dot product.
template <typename DerivedA, typename DerivedB>
double cosine_similarity(const Eigen::MatrixBase<DerivedA>& a,
                         const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) {
    throw Error(Errc::invalid_argument,
                "cosine_similarity: dimension mismatch (" + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()) + ")");
  }
  const double denom = a.norm() * b.norm();
  if (denom == 0.0) {
    throw Error(Errc::invalid_argument, "cosine_similarity: zero-norm vector");
  }
  return a.dot(b) / denom;
}

template <typename Derived>
bool is_unit_norm(const Eigen::MatrixBase<Derived>& v, double tol = 1e-6) {
  const double n = v.norm();
  return n >= 1.0 - tol && n <= 1.0 + tol;
}

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

}  // namespace metasynth
