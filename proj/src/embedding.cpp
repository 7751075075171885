#include "metasynth/embedding.hpp"

#include <vector>

#include "metasynth/errors.hpp"
#include "metasynth/text.hpp"

namespace metasynth {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t hash = 14695981039346656037ull ^ (seed * 0x9e3779b97f4a7c15ull);
  for (unsigned char byte : data) {
    hash ^= byte;
    hash *= 1099511628211ull;
  }
  return hash;
}

HashingEmbedder::HashingEmbedder(int dimension, std::uint64_t seed, bool word_bigrams)
    : dimension_(dimension), seed_(seed), word_bigrams_(word_bigrams) {
  if (dimension < 1) {
    throw Error(Errc::invalid_argument, "HashingEmbedder: dimension must be >= 1");
  }
}

std::string HashingEmbedder::name() const {
  return "hashing-ngrams-d" + std::to_string(dimension_);
}

Eigen::VectorXd HashingEmbedder::embed_text(std::string_view text) const {
  if (text.empty()) {
    throw Error(Errc::invalid_argument, "embed_text: empty text");
  }
  const std::vector<std::string> tokens = tokenize(text);
  if (tokens.empty()) {
    throw Error(Errc::invalid_argument, "embed_text: text has no alphanumeric tokens");
  }

  Eigen::VectorXd vec = Eigen::VectorXd::Zero(dimension_);
  auto accumulate = [&](std::string_view feature) {
    const std::uint64_t hash = fnv1a64(feature, seed_);
    const auto bucket = static_cast<Eigen::Index>(hash % static_cast<std::uint64_t>(dimension_));
    const double sign = (hash >> 63) ? -1.0 : 1.0;
    vec[bucket] += sign;
  };

  for (const std::string& token : tokens) accumulate(token);
  if (word_bigrams_) {
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      accumulate(tokens[i] + '\x1f' + tokens[i + 1]);
    }
  }

  const double norm = vec.norm();
  if (norm == 0.0) {
    // Signed counts can cancel exactly; fall back to a deterministic
    // one-hot so the unit-norm contract still holds.
    const std::uint64_t hash = fnv1a64(tokens.front(), seed_ + 1);
    vec[static_cast<Eigen::Index>(hash % static_cast<std::uint64_t>(dimension_))] = 1.0;
    return vec;
  }
  return vec / norm;
}

Eigen::VectorXd MemoizingProvider::embed_text(std::string_view text) const {
  const std::string key(text);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  Eigen::VectorXd vec = inner_->embed_text(text);
  std::lock_guard<std::mutex> lock(mutex_);
  return memo_.emplace(key, std::move(vec)).first->second;
}

std::string serialize_page(const ProductPage& page) {
  std::string out;
  for (std::size_t i = 0; i < page.attributes.size(); ++i) {
    if (i > 0) out.push_back('\n');
    out += page.attributes[i].name;
    out += ": ";
    out += page.attributes[i].value;
  }
  return out;
}

Eigen::VectorXd embed_page(const EmbeddingProvider& provider, const ProductPage& page) {
  return provider.embed_text(serialize_page(page));
}

Eigen::VectorXd embed_exemplar(const EmbeddingProvider& provider,
                               std::string_view title, std::string_view description) {
  return provider.embed_text(concat_snippet(title, description));
}

}  // namespace metasynth
