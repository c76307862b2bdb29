#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ufd/corpus.hpp"

namespace ufd {

// EmoWOZ user-emotion ids; 2 (dissatisfied) and 4 (abusive) mark frustration.
inline constexpr int kEmoDissatisfied = 2;
inline constexpr int kEmoAbusive = 4;

// The converted dialogs open with this synthetic system turn because the
// source logs start with the user.
inline constexpr std::string_view kSyntheticOpening = "[START]";

struct EmowozConversion {
  Corpus dialogs;
  std::vector<std::string> skipped;  // "id: reason"
};

// Accepts the released layouts: an object keyed by dialogue id or an array
// of records with "dialogue_id", each holding "log" as a list of turns
// ({"text", "emotion"}) or as columns ({"text": [...], "emotion": [...]}).
// Turn emotion may be an int, {"emotion": int}, or a list of annotations
// (the "final" annotator wins, otherwise the majority). Log turns alternate
// user/system starting with the user. A dialog is labeled 1 iff any user
// turn is dissatisfied or abusive.
EmowozConversion convert_emowoz(std::string_view json_text);

}  // namespace ufd
