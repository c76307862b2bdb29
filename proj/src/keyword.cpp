#include "ufd/keyword.hpp"

#include <algorithm>
#include <sstream>

#include "ufd/error.hpp"
#include "ufd/fileio.hpp"
#include "ufd/textmetrics.hpp"

namespace ufd {

namespace {

std::string trim_lower(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n\f\v");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\f\v");
  std::string out(s.substr(b, e - b + 1));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c); });
  return out;
}

bool contains_run(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

KeywordSet::KeywordSet(std::span<const std::string> keywords) {
  for (const auto& raw : keywords) {
    auto kw = trim_lower(raw);
    if (kw.empty()) throw ValidationError("keyword is empty or whitespace");
    auto toks = tokenize(kw);
    if (toks.empty()) throw ValidationError("keyword \"" + kw + "\" contains no word characters");
    if (keywords_.insert(kw).second) entries_.push_back({std::move(kw), std::move(toks)});
  }
  if (keywords_.empty()) throw ValidationError("keyword set is empty");
}

KeywordSet parse_keywords(std::string_view text) {
  std::vector<std::string> kws;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    auto t = trim_lower(line);
    if (t.empty() || t.front() == '#') continue;
    kws.push_back(std::move(t));
  }
  if (kws.empty()) throw ValidationError("keyword file contains no keywords");
  return KeywordSet(kws);
}

KeywordSet load_keywords(const std::filesystem::path& path) { return parse_keywords(read_file(path)); }

DetectionResult detect_keyword(const Dialog& d, const KeywordSet& keywords) {
  DetectionResult r{d.id(), FrustrationLabel::not_frustrated(), 0.0, "keyword", std::nullopt};
  for (const auto& t : d.turns()) {
    if (t.speaker != Speaker::kUser) continue;
    const auto toks = tokenize(t.text);
    for (const auto& e : keywords.entries()) {
      if (contains_run(toks, e.tokens)) {
        r.label = FrustrationLabel::frustrated();
        r.score = 1.0;
        r.rationale = "turn " + std::to_string(t.index) + " matched \"" + e.keyword + "\"";
        return r;
      }
    }
  }
  return r;
}

}  // namespace ufd
