#include "ufd/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "ufd/error.hpp"
#include "ufd/fileio.hpp"
#include "ufd/textmetrics.hpp"

namespace ufd {

bool EmbeddingVector::is_zero() const {
  for (double v : values)
    if (v != 0.0) return false;
  return true;
}

double EmbeddingVector::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dim() != v.dim())
    throw ValidationError("cosine: dimension mismatch (" + std::to_string(u.dim()) + " vs " +
                          std::to_string(v.dim()) + ")");
  double dot = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (std::size_t i = 0; i < u.dim(); ++i) {
    dot += u.values[i] * v.values[i];
    nu += u.values[i] * u.values[i];
    nv += v.values[i] * v.values[i];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  const double c = dot / (std::sqrt(nu) * std::sqrt(nv));
  return std::clamp(c, -1.0, 1.0);
}

EmbeddingVector l2_normalize(std::vector<double> values) {
  double s = 0.0;
  for (double v : values) s += v * v;
  if (s > 0.0) {
    const double inv = 1.0 / std::sqrt(s);
    for (double& v : values) v *= inv;
  }
  return EmbeddingVector{std::move(values)};
}

HashingEmbedder::HashingEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw ValidationError("embedding dimension must be positive");
}

EmbeddingVector HashingEmbedder::embed(std::string_view text) const {
  std::vector<double> acc(dim_, 0.0);
  for (const auto& tok : tokenize(text)) {
    const std::uint64_t h = fnv1a64(tok);
    acc[h % dim_] += (h >> 63) ? -1.0 : 1.0;
  }
  return l2_normalize(std::move(acc));
}

std::string HashingEmbedder::name() const { return "hashing-fnv1a-" + std::to_string(dim_); }

RemoteEmbedderConfig RemoteEmbedderConfig::from_env() {
  RemoteEmbedderConfig c;
  c.base_url = env_value("EMBED_BASE_URL").value_or("");
  c.api_key = env_value("EMBED_API_KEY");
  return c;
}

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderConfig cfg)
    : cfg_(std::move(cfg)),
      http_(cfg_.base_url, cfg_.timeout, cfg_.api_key, cfg_.retry),
      in_flight_(std::clamp<std::ptrdiff_t>(cfg_.max_in_flight, 1, kMaxInFlightCap)) {
  if (cfg_.max_in_flight < 1) throw ValidationError("embedding max_in_flight must be >= 1");
}

EmbeddingVector RemoteEmbedder::embed(std::string_view text) const {
  const std::string key(text);
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  std::string body;
  in_flight_.acquire();
  try {
    body = http_.post_json("/embed", nlohmann::json{{"input", key}}.dump());
  } catch (...) {
    in_flight_.release();
    throw;
  }
  in_flight_.release();

  std::vector<double> values;
  try {
    const auto j = nlohmann::json::parse(body);
    const auto& e = j.at("embedding");
    if (!e.is_array() || e.empty()) throw ProtocolError("\"embedding\" must be a non-empty array");
    values.reserve(e.size());
    for (const auto& x : e) {
      if (!x.is_number()) throw ProtocolError("\"embedding\" must contain numbers only");
      values.push_back(x.get<double>());
      if (!std::isfinite(values.back())) throw ProtocolError("non-finite embedding component");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed embedding response: ") + e.what());
  }

  auto vec = l2_normalize(std::move(values));
  std::lock_guard lock(mu_);
  if (!dim_) dim_ = vec.dim();
  if (*dim_ != vec.dim())
    throw ProtocolError("embedding dimension changed from " + std::to_string(*dim_) + " to " +
                        std::to_string(vec.dim()));
  cache_.emplace(key, vec);
  return vec;
}

std::string RemoteEmbedder::name() const { return "remote:" + cfg_.base_url; }

}  // namespace ufd
