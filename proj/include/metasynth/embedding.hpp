#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "metasynth/types.hpp"

namespace metasynth {

/// Provider contract. Implementations must be deterministic (same text, same
/// vector) and return unit-norm vectors of the advertised dimension.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string name() const = 0;
  virtual int dimension() const = 0;
  virtual Eigen::VectorXd embed_text(std::string_view text) const = 0;
};

/// Reference embedder: hashed bag of token unigrams plus word bigrams.
/// Lowercases, splits on non-alphanumerics, hashes each feature with a
/// seeded 64-bit FNV-1a to a bucket with a sign bit, accumulates counts and
/// L2-normalizes. Dependency-free and fully deterministic, which is what the
/// offline pipeline and every test run on.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  static constexpr int kDefaultDimension = 256;
  static constexpr std::uint64_t kDefaultSeed = 0x6d657461u;  // arbitrary fixed seed

  explicit HashingEmbedder(int dimension = kDefaultDimension,
                           std::uint64_t seed = kDefaultSeed,
                           bool word_bigrams = true);

  std::string name() const override;
  int dimension() const override { return dimension_; }
  Eigen::VectorXd embed_text(std::string_view text) const override;

 private:
  int dimension_;
  std::uint64_t seed_;
  bool word_bigrams_;
};

/// Optional in-memory memo keyed by input text. Thread-safe.
class MemoizingProvider final : public EmbeddingProvider {
 public:
  explicit MemoizingProvider(std::shared_ptr<const EmbeddingProvider> inner)
      : inner_(std::move(inner)) {}

  std::string name() const override { return inner_->name(); }
  int dimension() const override { return inner_->dimension(); }
  Eigen::VectorXd embed_text(std::string_view text) const override;

 private:
  std::shared_ptr<const EmbeddingProvider> inner_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, Eigen::VectorXd> memo_;
};

/// Seeded FNV-1a over the bytes of `data`.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed);

/// Canonical page serialization: one "name: value" line per attribute, in
/// insertion order, joined by newlines.
std::string serialize_page(const ProductPage& page);

/// g_x: embed the canonical page serialization.
Eigen::VectorXd embed_page(const EmbeddingProvider& provider, const ProductPage& page);

/// g_y: embed the concatenated snippet text.
Eigen::VectorXd embed_exemplar(const EmbeddingProvider& provider,
                               std::string_view title, std::string_view description);

}  // namespace metasynth
