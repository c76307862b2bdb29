#include "ufd/textmetrics.hpp"

#include <algorithm>
#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <unordered_set>

#include "ufd/embeddings.hpp"
#include "ufd/error.hpp"

namespace ufd {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (is_word_byte(c)) {
      cur += c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::set<std::string> token_set(std::string_view text) {
  auto toks = tokenize(text);
  return {std::make_move_iterator(toks.begin()), std::make_move_iterator(toks.end())};
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& t : a) inter += b.count(t);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::u32string utf8_decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    char32_t cp = c;
    if (c >= 0xF0 && c < 0xF8) {
      extra = 3;
      cp = c & 0x07;
    } else if (c >= 0xE0) {
      extra = c < 0xF0 ? 2 : 0;
      cp = c & 0x0F;
    } else if (c >= 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    }
    bool ok = c < 0x80 || (extra > 0 && i + extra < s.size());
    for (std::size_t k = 1; ok && k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      ok = (cc & 0xC0) == 0x80;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (ok && extra > 0) {
      out.push_back(cp);
      i += extra + 1;
    } else {
      out.push_back(c);
      ++i;
    }
  }
  return out;
}

std::size_t char_length(std::string_view s) { return utf8_decode(s).size(); }

std::size_t levenshtein_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

double levenshtein_similarity(std::string_view a, std::string_view b) {
  const auto ua = utf8_decode(a);
  const auto ub = utf8_decode(b);
  const std::size_t longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein_distance(ua, ub)) / static_cast<double>(longest);
}

double moving_mean(std::span<const double> values) {
  if (values.empty()) throw ValidationError("moving_mean of an empty list");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

CorpusStats corpus_stats(std::span<const Dialog> corpus, const EmbeddingProvider* embed,
                         const StatsOptions& opts) {
  if (corpus.empty()) throw ValidationError("corpus_stats: corpus is empty");
  auto in_unit = [](double t) { return t > 0.0 && t <= 1.0; };
  if (!in_unit(opts.fuzzy_threshold) || !in_unit(opts.cosine_threshold))
    throw ValidationError("corpus_stats: thresholds must lie in (0, 1]");

  CorpusStats s;
  s.n_dialogs = corpus.size();
  std::unordered_set<std::string> vocab;
  for (const auto& d : corpus) {
    const std::string* prev = nullptr;
    for (const auto& t : d.turns()) {
      auto toks = tokenize(t.text);
      if (t.speaker == Speaker::kUser) {
        ++s.n_user_turns;
        s.n_user_tokens += toks.size();
        if (prev) {
          ++s.n_user_turns_with_predecessor;
          if (levenshtein_similarity(*prev, t.text) >= opts.fuzzy_threshold) ++s.n_repeated_fuzzy;
          if (embed && cosine(embed->embed(*prev), embed->embed(t.text)) >= opts.cosine_threshold)
            ++s.n_repeated_cosine;
        }
        prev = &t.text;
      }
      for (auto& tok : toks) vocab.insert(std::move(tok));
    }
  }
  s.n_unique_tokens = vocab.size();
  s.avg_tokens_per_user_turn =
      s.n_user_turns ? static_cast<double>(s.n_user_tokens) / static_cast<double>(s.n_user_turns) : 0.0;
  s.avg_user_tokens_per_dialog = static_cast<double>(s.n_user_tokens) / static_cast<double>(s.n_dialogs);
  auto pct = [&](std::size_t k) {
    return s.n_user_turns_with_predecessor
               ? 100.0 * static_cast<double>(k) / static_cast<double>(s.n_user_turns_with_predecessor)
               : 0.0;
  };
  s.pct_repeated_fuzzy = pct(s.n_repeated_fuzzy);
  if (embed) s.pct_repeated_cosine = pct(s.n_repeated_cosine);
  return s;
}

std::string stats_to_json(const CorpusStats& s, const StatsOptions& opts) {
  nlohmann::ordered_json j;
  j["n_dialogs"] = s.n_dialogs;
  j["n_unique_tokens"] = s.n_unique_tokens;
  j["avg_tokens_per_user_turn"] = s.avg_tokens_per_user_turn;
  j["avg_user_tokens_per_dialog"] = s.avg_user_tokens_per_dialog;
  j["pct_repeated_fuzzy"] = s.pct_repeated_fuzzy;
  j["pct_repeated_cosine"] = s.pct_repeated_cosine ? nlohmann::ordered_json(*s.pct_repeated_cosine) : nullptr;
  j["fuzzy_threshold"] = opts.fuzzy_threshold;
  j["cosine_threshold"] = opts.cosine_threshold;
  j["repetition_rate_basis"] = "per user utterance with a preceding user utterance in the same dialog";
  return j.dump(2);
}

std::string stats_to_text(const CorpusStats& s, const StatsOptions& opts) {
  std::ostringstream o;
  o << "# repeated-utterance rates: per user utterance with a predecessor in the same dialog\n"
    << "# fuzzy threshold " << opts.fuzzy_threshold << " (normalized Levenshtein), cosine threshold "
    << opts.cosine_threshold << "\n";
  o << std::fixed;
  auto row = [&](std::string_view name, const std::string& v) {
    o << std::left << std::setw(30) << name << std::right << std::setw(12) << v << "\n";
  };
  auto num = [](double v, int prec) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(prec) << v;
    return ss.str();
  };
  row("# Dialogues", std::to_string(s.n_dialogs));
  row("# Unique tokens", std::to_string(s.n_unique_tokens));
  row("Avg. tokens / user turn", num(s.avg_tokens_per_user_turn, 2));
  row("Avg. user tokens / dialogue", num(s.avg_user_tokens_per_dialog, 2));
  row("% Repeated Utt. (fuzzy)", num(s.pct_repeated_fuzzy, 2) + "%");
  row("% Repeated Utt. (cosine)", s.pct_repeated_cosine ? num(*s.pct_repeated_cosine, 2) + "%" : "n/a");
  return o.str();
}

}  // namespace ufd
