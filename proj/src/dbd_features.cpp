#include "ufd/dbd.hpp"

#include "ufd/parallel.hpp"
#include "ufd/textmetrics.hpp"

namespace ufd {

FeatureVector extract_features(const Dialog& d, const EmbeddingProvider& embed) {
  const std::size_t pairs = d.num_pairs();
  std::vector<EmbeddingVector> sys_emb, usr_emb;
  std::vector<std::set<std::string>> sys_tok, usr_tok;
  double user_chars = 0.0;
  double sys_chars = 0.0;
  for (std::size_t t = 0; t < pairs; ++t) {
    sys_emb.push_back(embed.embed(d.system_text(t)));
    usr_emb.push_back(embed.embed(d.user_text(t)));
    sys_tok.push_back(token_set(d.system_text(t)));
    usr_tok.push_back(token_set(d.user_text(t)));
    sys_chars += static_cast<double>(char_length(d.system_text(t)));
    user_chars += static_cast<double>(char_length(d.user_text(t)));
  }

  FeatureVector f;
  if (pairs >= 2) {
    std::array<std::vector<double>, 6> series;
    for (std::size_t t = 1; t < pairs; ++t) {
      series[0].push_back(cosine(usr_emb[t - 1], usr_emb[t]));
      series[1].push_back(cosine(sys_emb[t - 1], sys_emb[t]));
      series[2].push_back(cosine(sys_emb[t - 1], usr_emb[t]));
      series[3].push_back(jaccard(usr_tok[t - 1], usr_tok[t]));
      series[4].push_back(jaccard(sys_tok[t - 1], sys_tok[t]));
      series[5].push_back(jaccard(sys_tok[t - 1], usr_tok[t]));
    }
    for (std::size_t k = 0; k < series.size(); ++k) f.values[k] = moving_mean(series[k]);
  }
  const double n = static_cast<double>(pairs);
  f[Feature::kLenUser] = user_chars / n;
  f[Feature::kLenSystem] = sys_chars / n;
  f[Feature::kLenDialog] = user_chars + sys_chars;
  f[Feature::kNumTurns] = n;
  return f;
}

std::vector<FeatureVector> extract_features_batch(std::span<const Dialog> corpus,
                                                  const EmbeddingProvider& embed, std::size_t jobs) {
  std::vector<FeatureVector> out(corpus.size());
  parallel_for(corpus.size(), jobs, [&](std::size_t i) { out[i] = extract_features(corpus[i], embed); });
  return out;
}

}  // namespace ufd
