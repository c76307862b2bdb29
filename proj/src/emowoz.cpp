#include "ufd/emowoz.hpp"

#include <json.hpp>
#include <map>
#include <optional>

#include "ufd/error.hpp"

namespace ufd {

using nlohmann::json;

namespace {

std::optional<int> emotion_of(const json& e) {
  if (e.is_null()) return std::nullopt;
  if (e.is_number_integer()) {
    const int v = e.get<int>();
    return v < 0 ? std::nullopt : std::optional<int>(v);
  }
  if (e.is_object()) {
    if (e.contains("emotion")) return emotion_of(e["emotion"]);
    return std::nullopt;
  }
  if (e.is_array()) {
    std::map<int, int> votes;
    for (const auto& a : e) {
      if (a.is_object() && a.value("annotator", std::string()) == "final") return emotion_of(a);
      if (auto v = emotion_of(a)) ++votes[*v];
    }
    std::optional<int> best;
    int best_n = 0;
    for (const auto& [v, n] : votes)
      if (n > best_n) {
        best = v;
        best_n = n;
      }
    return best;
  }
  return std::nullopt;
}

struct RawTurn {
  std::string text;
  std::optional<int> emotion;
};

std::vector<RawTurn> read_log(const json& log) {
  std::vector<RawTurn> turns;
  if (log.is_object()) {
    const auto& texts = log.at("text");
    const json empty = json::array();
    const auto& emos = log.contains("emotion") ? log["emotion"] : empty;
    for (std::size_t i = 0; i < texts.size(); ++i)
      turns.push_back({texts[i].get<std::string>(), i < emos.size() ? emotion_of(emos[i]) : std::nullopt});
  } else if (log.is_array()) {
    for (const auto& t : log) {
      RawTurn rt;
      rt.text = t.at("text").get<std::string>();
      if (t.contains("emotion")) rt.emotion = emotion_of(t["emotion"]);
      turns.push_back(std::move(rt));
    }
  } else {
    throw ProtocolError("\"log\" must be an array or an object of columns");
  }
  return turns;
}

Dialog to_dialog(const std::string& id, const std::vector<RawTurn>& log) {
  std::vector<TurnInput> turns;
  turns.push_back({Speaker::kSystem, std::string(kSyntheticOpening)});
  bool frustrated = false;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const bool user = i % 2 == 0;
    turns.push_back({user ? Speaker::kUser : Speaker::kSystem, log[i].text});
    if (user && log[i].emotion && (*log[i].emotion == kEmoDissatisfied || *log[i].emotion == kEmoAbusive))
      frustrated = true;
  }
  return Dialog::create(id, Domain::kOther, std::move(turns),
                        frustrated ? FrustrationLabel::frustrated() : FrustrationLabel::not_frustrated());
}

}  // namespace

EmowozConversion convert_emowoz(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    // JSON Lines export: one record per line.
    root = json::array();
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < json_text.size()) {
      auto nl = json_text.find('\n', pos);
      if (nl == std::string_view::npos) nl = json_text.size();
      const auto line = json_text.substr(pos, nl - pos);
      ++line_no;
      pos = nl + 1;
      if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
      try {
        root.push_back(json::parse(line));
      } catch (const json::parse_error&) {
        throw ParseError(std::string("malformed EmoWOZ JSON: ") + e.what(), line_no);
      }
    }
  }
  EmowozConversion out;
  auto one = [&](const std::string& id, const json& rec) {
    try {
      out.dialogs.push_back(to_dialog(id, read_log(rec.at("log"))));
    } catch (const json::exception& e) {
      out.skipped.push_back(id + ": " + e.what());
    } catch (const Error& e) {
      out.skipped.push_back(id + ": " + e.what());
    }
  };
  if (root.is_object()) {
    for (const auto& [id, rec] : root.items()) one(id, rec);
  } else if (root.is_array()) {
    std::size_t i = 0;
    for (const auto& rec : root) {
      std::string id = rec.is_object() && rec.contains("dialogue_id") && rec["dialogue_id"].is_string()
                           ? rec["dialogue_id"].get<std::string>()
                           : "dialog-" + std::to_string(i);
      ++i;
      one(id, rec);
    }
  } else {
    throw ProtocolError("EmoWOZ root must be an object or an array");
  }
  return out;
}

}  // namespace ufd
