#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ufd/corpus.hpp"

namespace ufd {

class EmbeddingProvider;

// Lowercases ASCII and splits on maximal runs of non-alphanumeric bytes.
// Bytes >= 0x80 count as word characters so UTF-8 letters stay inside tokens.
std::vector<std::string> tokenize(std::string_view text);
std::set<std::string> token_set(std::string_view text);

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

// Decodes UTF-8 into code points; invalid bytes decode as themselves.
std::u32string utf8_decode(std::string_view s);
std::size_t char_length(std::string_view s);

// Unit-cost edit distance over code points.
std::size_t levenshtein_distance(std::u32string_view a, std::u32string_view b);
// 1 - distance / max(|a|, |b|); 1.0 for two empty strings.
double levenshtein_similarity(std::string_view a, std::string_view b);

// Mean over all consecutive-pair values. Throws ValidationError on empty input.
double moving_mean(std::span<const double> values);

struct StatsOptions {
  double fuzzy_threshold = 0.8;
  double cosine_threshold = 0.9;
};

struct CorpusStats {
  std::size_t n_dialogs = 0;
  std::size_t n_unique_tokens = 0;
  double avg_tokens_per_user_turn = 0.0;
  double avg_user_tokens_per_dialog = 0.0;
  double pct_repeated_fuzzy = 0.0;
  // Absent when no embedding provider was supplied.
  std::optional<double> pct_repeated_cosine;

  // Bookkeeping behind the averages and rates.
  std::size_t n_user_turns = 0;
  std::size_t n_user_tokens = 0;
  std::size_t n_user_turns_with_predecessor = 0;
  std::size_t n_repeated_fuzzy = 0;
  std::size_t n_repeated_cosine = 0;
};

// Repetition is measured between each user utterance and the preceding user
// utterance of the same dialog; rates are per user utterance that has a
// predecessor (0 when none has). `embed` may be null to skip cosine.
CorpusStats corpus_stats(std::span<const Dialog> corpus, const EmbeddingProvider* embed,
                         const StatsOptions& opts = {});

std::string stats_to_json(const CorpusStats& s, const StatsOptions& opts);
std::string stats_to_text(const CorpusStats& s, const StatsOptions& opts);

}  // namespace ufd
