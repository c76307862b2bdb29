#pragma once

// Straight-line reference implementations used only by tests. They share no
// code with the library paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <regex>
#include <set>
#include <string>
#include <vector>

namespace ufd::oracle {

inline std::vector<std::string> tokens(const std::string& text) {
  std::string lower = text;
  for (auto& c : lower)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  static const std::regex word("[a-z0-9\\x80-\\xff]+");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(lower.begin(), lower.end(), word); it != std::sregex_iterator(); ++it)
    out.push_back(it->str());
  return out;
}

inline double jaccard(const std::string& a, const std::string& b) {
  auto ta = tokens(a), tb = tokens(b);
  std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::set<std::string> uni = sa;
  uni.insert(sb.begin(), sb.end());
  std::size_t inter = 0;
  for (const auto& t : sa) inter += sb.count(t);
  return static_cast<double>(inter) / static_cast<double>(uni.size());
}

// ASCII-only inputs in the tests, so bytes are characters.
inline std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> m(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) m[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) m[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = m[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      m[i][j] = std::min(sub, std::min(m[i - 1][j] + 1, m[i][j - 1] + 1));
    }
  return m[a.size()][b.size()];
}

inline double edit_similarity(const std::string& a, const std::string& b) {
  const std::size_t n = std::max(a.size(), b.size());
  return n == 0 ? 1.0 : 1.0 - static_cast<double>(edit_distance(a, b)) / static_cast<double>(n);
}

// Hash-accumulate-normalize reference for the local embedder.
inline std::vector<double> hashed_embedding(const std::string& text, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  for (const auto& tok : tokens(text)) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : tok) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    const double sign = (h & (1ull << 63)) ? -1.0 : 1.0;
    v[h % dim] += sign;
  }
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  if (n2 > 0.0)
    for (double& x : v) x /= std::sqrt(n2);
  return v;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

// Ten dialog-breakdown features for texts laid out system, user, system, ...
// Characters are counted as UTF-8 lead bytes.
inline std::vector<double> dbd_features(const std::vector<std::string>& texts, std::size_t dim = 256) {
  const std::size_t T = texts.size() / 2;
  auto s = [&](std::size_t t) { return texts[2 * t]; };
  auto u = [&](std::size_t t) { return texts[2 * t + 1]; };
  auto chars = [](const std::string& x) {
    double n = 0;
    for (unsigned char c : x) n += (c & 0xC0) != 0x80;
    return n;
  };
  auto cos = [&](const std::string& a, const std::string& b) {
    return cosine(hashed_embedding(a, dim), hashed_embedding(b, dim));
  };
  std::vector<double> f(10, 0.0);
  if (T >= 2) {
    for (std::size_t t = 1; t < T; ++t) {
      f[0] += cos(u(t - 1), u(t));
      f[1] += cos(s(t - 1), s(t));
      f[2] += cos(s(t - 1), u(t));
      f[3] += jaccard(u(t - 1), u(t));
      f[4] += jaccard(s(t - 1), s(t));
      f[5] += jaccard(s(t - 1), u(t));
    }
    for (int k = 0; k < 6; ++k) f[k] /= static_cast<double>(T - 1);
  }
  double su = 0, ss = 0;
  for (std::size_t t = 0; t < T; ++t) {
    su += chars(u(t));
    ss += chars(s(t));
  }
  f[6] = su / static_cast<double>(T);
  f[7] = ss / static_cast<double>(T);
  f[8] = su + ss;
  f[9] = static_cast<double>(T);
  return f;
}

// Fleiss' kappa from explicit per-rater category lists: observed agreement by
// enumerating ordered rater pairs, chance agreement from pooled marginals.
inline double fleiss_kappa(const std::vector<std::vector<int>>& ratings, int categories) {
  const double N = static_cast<double>(ratings.size());
  double pbar = 0.0;
  std::vector<double> marg(static_cast<std::size_t>(categories), 0.0);
  double total = 0.0;
  for (const auto& item : ratings) {
    double agree = 0.0;
    for (std::size_t a = 0; a < item.size(); ++a)
      for (std::size_t b = 0; b < item.size(); ++b)
        if (a != b && item[a] == item[b]) agree += 1.0;
    const double n = static_cast<double>(item.size());
    pbar += agree / (n * (n - 1.0));
    for (int r : item) marg[static_cast<std::size_t>(r)] += 1.0;
    total += n;
  }
  pbar /= N;
  double pe = 0.0;
  for (double m : marg) pe += (m / total) * (m / total);
  return (pbar - pe) / (1.0 - pe);
}

}  // namespace ufd::oracle
