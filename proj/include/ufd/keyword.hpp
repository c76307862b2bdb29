#pragma once

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ufd/detection.hpp"

namespace ufd {

// Curated lowercase keywords and phrases. Each entry is matched as a
// contiguous token sequence after tokenize().
class KeywordSet {
 public:
  // Throws ValidationError if the set is empty or an entry has no tokens.
  explicit KeywordSet(std::span<const std::string> keywords);

  const std::set<std::string>& keywords() const { return keywords_; }
  struct Entry {
    std::string keyword;
    std::vector<std::string> tokens;
  };
  // Insertion order of first occurrence.
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::set<std::string> keywords_;
  std::vector<Entry> entries_;
};

// One entry per line; '#' comment lines and blank lines are skipped.
KeywordSet load_keywords(const std::filesystem::path& path);
KeywordSet parse_keywords(std::string_view text);

// Label 1 iff a user turn contains some keyword as a whole-token run.
// System turns are never inspected.
DetectionResult detect_keyword(const Dialog& d, const KeywordSet& keywords);

class KeywordDetector final : public Detector {
 public:
  explicit KeywordDetector(KeywordSet keywords) : keywords_(std::move(keywords)) {}
  DetectionResult detect(const Dialog& d) const override { return detect_keyword(d, keywords_); }
  std::string name() const override { return "keyword"; }

 private:
  KeywordSet keywords_;
};

}  // namespace ufd
