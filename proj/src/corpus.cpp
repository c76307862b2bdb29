#include "ufd/corpus.hpp"

#include <algorithm>
#include <json.hpp>
#include <sstream>

#include "ufd/error.hpp"
#include "ufd/fileio.hpp"

namespace ufd {

using nlohmann::json;

namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

std::string_view to_string(Speaker s) {
  return s == Speaker::kSystem ? "system" : "user";
}

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::kBooking:
      return "booking";
    case Domain::kReceptionist:
      return "receptionist";
    case Domain::kOther:
      break;
  }
  return "other";
}

Speaker parse_speaker(std::string_view s) {
  if (s == "system") return Speaker::kSystem;
  if (s == "user") return Speaker::kUser;
  throw ValidationError("unknown speaker \"" + std::string(s) + "\"");
}

Domain parse_domain(std::string_view s) {
  if (s == "booking") return Domain::kBooking;
  if (s == "receptionist") return Domain::kReceptionist;
  if (s == "other") return Domain::kOther;
  throw ValidationError("unknown domain \"" + std::string(s) + "\"");
}

FrustrationLabel FrustrationLabel::from_int(long long v) {
  if (v != 0 && v != 1)
    throw ValidationError("label must be 0 or 1, got " + std::to_string(v));
  return FrustrationLabel(static_cast<int>(v));
}

Dialog Dialog::create(std::string id, Domain domain, std::vector<TurnInput> turns,
                      std::optional<FrustrationLabel> label) {
  if (turns.size() < 2)
    throw ValidationError("dialog \"" + id + "\" needs at least 2 turns (one system/user pair), got " +
                          std::to_string(turns.size()));
  Dialog d;
  d.turns_.reserve(turns.size());
  for (std::size_t i = 0; i < turns.size(); ++i) {
    const Speaker expected = i % 2 == 0 ? Speaker::kSystem : Speaker::kUser;
    if (turns[i].speaker != expected) {
      if (i == 0) throw ValidationError("dialog \"" + id + "\" must start with SYSTEM");
      throw ValidationError("dialog \"" + id + "\" turns must alternate SYSTEM/USER; turn " +
                            std::to_string(i) + " is " + std::string(to_string(turns[i].speaker)));
    }
    if (is_blank(turns[i].text))
      throw ValidationError("dialog \"" + id + "\" turn " + std::to_string(i) + " has empty text");
    d.turns_.push_back(Turn{turns[i].speaker, std::move(turns[i].text), i});
  }
  d.id_ = std::move(id);
  d.domain_ = domain;
  d.label_ = label;
  return d;
}

Dialog Dialog::with_label(std::optional<FrustrationLabel> label) const {
  Dialog d = *this;
  d.label_ = label;
  return d;
}

Dialog Dialog::with_texts(std::vector<std::string> texts) const {
  if (texts.size() != turns_.size())
    throw ValidationError("with_texts: expected " + std::to_string(turns_.size()) + " texts");
  std::vector<TurnInput> in;
  in.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) in.push_back({turns_[i].speaker, std::move(texts[i])});
  return create(id_, domain_, std::move(in), label_);
}

Dialog parse_dialog_line(std::string_view json_line, std::size_t line) {
  json j;
  try {
    j = json::parse(json_line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line);
  }
  try {
    if (!j.is_object()) throw ValidationError("record must be a JSON object");
    if (!j.contains("id") || !j["id"].is_string()) throw ValidationError("\"id\" must be a string");
    Domain domain = Domain::kOther;
    if (j.contains("domain") && !j["domain"].is_null()) {
      if (!j["domain"].is_string()) throw ValidationError("\"domain\" must be a string");
      domain = parse_domain(j["domain"].get<std::string>());
    }
    if (!j.contains("turns") || !j["turns"].is_array()) throw ValidationError("\"turns\" must be an array");
    std::vector<TurnInput> turns;
    for (const auto& t : j["turns"]) {
      if (!t.is_object() || !t.contains("speaker") || !t["speaker"].is_string() || !t.contains("text") ||
          !t["text"].is_string())
        throw ValidationError("each turn needs string \"speaker\" and \"text\"");
      turns.push_back({parse_speaker(t["speaker"].get<std::string>()), t["text"].get<std::string>()});
    }
    std::optional<FrustrationLabel> label;
    if (j.contains("label") && !j["label"].is_null()) {
      const auto& l = j["label"];
      if (!l.is_number_integer()) throw ValidationError("label must be 0, 1 or null");
      label = FrustrationLabel::from_int(l.get<long long>());
    }
    return Dialog::create(j["id"].get<std::string>(), domain, std::move(turns), label);
  } catch (const ValidationError& e) {
    if (e.line() != 0 || line == 0) throw;
    throw ValidationError(e.what(), line);
  }
}

std::string to_json_line(const Dialog& d) {
  json turns = json::array();
  for (const auto& t : d.turns()) turns.push_back({{"speaker", to_string(t.speaker)}, {"text", t.text}});
  json j = {{"id", d.id()}, {"domain", to_string(d.domain())}, {"turns", std::move(turns)}};
  j["label"] = d.gold_label() ? json(d.gold_label()->value()) : json(nullptr);
  return j.dump();
}

Corpus parse_corpus(std::string_view jsonl) {
  Corpus out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= jsonl.size()) {
    const auto nl = jsonl.find('\n', pos);
    auto line = jsonl.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!is_blank(line)) out.push_back(parse_dialog_line(line, line_no));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

Corpus load_corpus(const std::filesystem::path& path) { return parse_corpus(read_file(path)); }

void save_corpus(const std::filesystem::path& path, std::span<const Dialog> corpus) {
  std::string out;
  for (const auto& d : corpus) {
    out += to_json_line(d);
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::string format_history(const Dialog& d) {
  std::string out;
  for (const auto& t : d.turns()) {
    if (!out.empty()) out += '\n';
    out += t.speaker == Speaker::kSystem ? "SYSTEM: " : "USER: ";
    out += t.text;
  }
  return out;
}

Redactor::Redactor(std::span<const std::string> patterns) {
  for (const auto& p : patterns) {
    try {
      patterns_.emplace_back(p, std::regex(p, std::regex::ECMAScript));
    } catch (const std::regex_error& e) {
      throw PatternError("invalid redaction pattern \"" + p + "\": " + e.what());
    }
  }
}

namespace {

std::string redact_segment(const std::string& seg, const std::regex& re) {
  std::string out;
  std::size_t last = 0;
  for (auto it = std::sregex_iterator(seg.begin(), seg.end(), re); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (m.length(0) == 0) continue;
    const auto start = static_cast<std::size_t>(m.position(0));
    out.append(seg, last, start - last);
    out += kRedactionToken;
    last = start + static_cast<std::size_t>(m.length(0));
  }
  out.append(seg, last);
  return out;
}

std::string apply_pattern(std::string_view text, const std::regex& re) {
  std::string out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto hit = text.find(kRedactionToken, pos);
    const auto end = hit == std::string_view::npos ? text.size() : hit;
    out += redact_segment(std::string(text.substr(pos, end - pos)), re);
    if (hit == std::string_view::npos) break;
    out += kRedactionToken;
    pos = hit + kRedactionToken.size();
  }
  return out;
}

}  // namespace

std::string Redactor::redact_text(std::string_view text) const {
  std::string out(text);
  for (const auto& [src, re] : patterns_) out = apply_pattern(out, re);
  return out;
}

Dialog Redactor::redact(const Dialog& d) const {
  if (patterns_.empty()) return d;
  std::vector<std::string> texts;
  for (const auto& t : d.turns()) texts.push_back(redact_text(t.text));
  return d.with_texts(std::move(texts));
}

Dialog redact(const Dialog& d, std::span<const std::string> patterns) {
  return Redactor(patterns).redact(d);
}

std::vector<std::string> load_patterns(const std::filesystem::path& path) {
  std::vector<std::string> out;
  std::istringstream in(read_file(path));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!is_blank(line)) out.push_back(line);
  }
  return out;
}

}  // namespace ufd
