#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ufd/http.hpp"

namespace ufd {

// Unit-norm sentence embedding, or the zero vector for empty text.
struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  bool is_zero() const;
  double norm() const;
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

// dot(u, v) / (|u| |v|); 0.0 when either side is zero. Throws
// ValidationError on a dimension mismatch.
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

EmbeddingVector l2_normalize(std::vector<double> values);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual EmbeddingVector embed(std::string_view text) const = 0;
  // Recorded in model metadata so a model is not silently reused with a
  // different embedder.
  virtual std::string name() const = 0;
};

// Signed feature hashing over tokenize(text): FNV-1a 64 per token, bucket =
// hash mod dim, sign from bit 63, then L2 normalization.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDefaultDim = 256;
  explicit HashingEmbedder(std::size_t dim = kDefaultDim);

  EmbeddingVector embed(std::string_view text) const override;
  std::string name() const override;
  std::size_t dim() const { return dim_; }

 private:
  std::size_t dim_;
};

struct RemoteEmbedderConfig {
  std::string base_url;
  std::optional<std::string> api_key;
  std::chrono::milliseconds timeout{30000};
  RetryPolicy retry{};
  std::ptrdiff_t max_in_flight = 8;

  // EMBED_BASE_URL / EMBED_API_KEY.
  static RemoteEmbedderConfig from_env();
};

// POST {base_url}/embed {"input": text} -> {"embedding": [...]}. Responses
// are normalized and cached in memory for the lifetime of the object.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  static constexpr std::ptrdiff_t kMaxInFlightCap = 256;

  explicit RemoteEmbedder(RemoteEmbedderConfig cfg);

  EmbeddingVector embed(std::string_view text) const override;
  std::string name() const override;
  HttpCounters counters() const { return http_.counters(); }

 private:
  RemoteEmbedderConfig cfg_;
  JsonHttpClient http_;
  mutable std::counting_semaphore<kMaxInFlightCap> in_flight_;
  mutable std::mutex mu_;
  mutable std::optional<std::size_t> dim_;
  mutable std::unordered_map<std::string, EmbeddingVector> cache_;
};

}  // namespace ufd
