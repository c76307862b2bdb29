#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ufd {

enum class Speaker { kSystem, kUser };
enum class Domain { kBooking, kReceptionist, kOther };

std::string_view to_string(Speaker s);
std::string_view to_string(Domain d);
Speaker parse_speaker(std::string_view s);  // throws ValidationError
Domain parse_domain(std::string_view s);    // throws ValidationError

// Binary per-dialog frustration label: 1 = frustrated.
class FrustrationLabel {
 public:
  static FrustrationLabel from_int(long long v);  // throws ValidationError
  static constexpr FrustrationLabel frustrated() { return FrustrationLabel(1); }
  static constexpr FrustrationLabel not_frustrated() { return FrustrationLabel(0); }

  constexpr int value() const { return value_; }
  constexpr bool is_frustrated() const { return value_ == 1; }
  friend constexpr bool operator==(FrustrationLabel, FrustrationLabel) = default;

 private:
  constexpr explicit FrustrationLabel(int v) : value_(v) {}
  int value_;
};

struct Turn {
  Speaker speaker;
  std::string text;
  std::size_t index;

  friend bool operator==(const Turn&, const Turn&) = default;
};

struct TurnInput {
  Speaker speaker;
  std::string text;
};

// A validated dialog: system-first, strictly alternating, at least one
// complete (system, user) pair. A trailing system turn without a user reply
// is allowed and belongs to no pair.
class Dialog {
 public:
  // Throws ValidationError naming the violated invariant.
  static Dialog create(std::string id, Domain domain, std::vector<TurnInput> turns,
                       std::optional<FrustrationLabel> label = std::nullopt);

  const std::string& id() const { return id_; }
  Domain domain() const { return domain_; }
  std::span<const Turn> turns() const { return turns_; }
  const std::optional<FrustrationLabel>& gold_label() const { return label_; }

  // Number of complete (system, user) pairs.
  std::size_t num_pairs() const { return turns_.size() / 2; }
  // Pair t is (turns[2t], turns[2t+1]); t is 0-based.
  const std::string& system_text(std::size_t t) const { return turns_[2 * t].text; }
  const std::string& user_text(std::size_t t) const { return turns_[2 * t + 1].text; }

  Dialog with_label(std::optional<FrustrationLabel> label) const;
  Dialog with_texts(std::vector<std::string> texts) const;

  friend bool operator==(const Dialog&, const Dialog&) = default;

 private:
  Dialog() = default;
  std::string id_;
  Domain domain_ = Domain::kOther;
  std::vector<Turn> turns_;
  std::optional<FrustrationLabel> label_;
};

using Corpus = std::vector<Dialog>;

// JSONL I/O. `line` is used for error messages only.
Dialog parse_dialog_line(std::string_view json_line, std::size_t line = 0);
std::string to_json_line(const Dialog& d);

Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_corpus(std::string_view jsonl);
void save_corpus(const std::filesystem::path& path, std::span<const Dialog> corpus);

// "SYSTEM: ..." / "USER: ..." one line per turn, no trailing newline.
std::string format_history(const Dialog& d);

inline constexpr std::string_view kRedactionToken = "[REDACTED]";

// Compiled redaction patterns. Existing "[REDACTED]" tokens are never
// rewritten and zero-length matches are skipped, which makes redaction
// idempotent.
class Redactor {
 public:
  explicit Redactor(std::span<const std::string> patterns);  // throws PatternError

  std::string redact_text(std::string_view text) const;
  Dialog redact(const Dialog& d) const;
  std::size_t num_patterns() const { return patterns_.size(); }

 private:
  std::vector<std::pair<std::string, std::regex>> patterns_;
};

Dialog redact(const Dialog& d, std::span<const std::string> patterns);

// One regex per line; blank lines are skipped.
std::vector<std::string> load_patterns(const std::filesystem::path& path);

}  // namespace ufd
