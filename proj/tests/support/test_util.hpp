#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ufd/corpus.hpp"
#include "ufd/fileio.hpp"

namespace ufd::testing {

// Builds a dialog from alternating texts: system, user, system, user, ...
inline Dialog make_dialog(std::string id, std::vector<std::string> texts,
                          std::optional<FrustrationLabel> label = std::nullopt,
                          Domain domain = Domain::kBooking) {
  std::vector<TurnInput> turns;
  for (std::size_t i = 0; i < texts.size(); ++i)
    turns.push_back({i % 2 == 0 ? Speaker::kSystem : Speaker::kUser, std::move(texts[i])});
  return Dialog::create(std::move(id), domain, std::move(turns), label);
}

inline std::optional<FrustrationLabel> label(int v) { return FrustrationLabel::from_int(v); }

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("ufd-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path file(const std::string& name) const { return path_ / name; }
  std::filesystem::path write(const std::string& name, const std::string& content) const {
    auto p = file(name);
    write_file_atomic(p, content);
    return p;
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words = {
      "book",   "appointment", "tomorrow", "no",      "yes",   "please", "time",    "slot",  "monday",
      "friday", "after",       "six",      "pm",      "agent", "human",  "transfer", "sales", "billing",
      "i",      "need",        "can",      "you",     "the",   "a",      "is",      "not",   "work",
      "that",   "does",        "sorry",    "available", "next", "what",  "about",   "6pm",   "ok"};
  return words;
}

inline std::string random_utterance(std::mt19937_64& rng, std::size_t min_words = 1, std::size_t max_words = 8) {
  const auto& v = vocabulary();
  std::uniform_int_distribution<std::size_t> n(min_words, max_words);
  std::uniform_int_distribution<std::size_t> w(0, v.size() - 1);
  std::bernoulli_distribution punct(0.3), cap(0.2);
  std::string out;
  const std::size_t k = n(rng);
  for (std::size_t i = 0; i < k; ++i) {
    if (i) out += punct(rng) ? ", " : " ";
    std::string word = v[w(rng)];
    if (cap(rng)) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
    out += word;
  }
  if (punct(rng)) out += "?";
  return out;
}

// Random valid dialog with `pairs` system/user pairs; user turns repeat the
// previous user turn with probability `repeat_p`.
inline Dialog random_dialog(std::mt19937_64& rng, const std::string& id, std::size_t pairs, double repeat_p = 0.2,
                            std::optional<FrustrationLabel> lbl = std::nullopt) {
  std::bernoulli_distribution rep(repeat_p);
  std::vector<std::string> texts;
  std::string last_user;
  for (std::size_t t = 0; t < pairs; ++t) {
    texts.push_back(random_utterance(rng, 2, 10));
    std::string u = (!last_user.empty() && rep(rng)) ? last_user : random_utterance(rng);
    last_user = u;
    texts.push_back(std::move(u));
  }
  return make_dialog(id, std::move(texts), lbl);
}

}  // namespace ufd::testing
