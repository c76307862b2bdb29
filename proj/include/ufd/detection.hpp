#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ufd/corpus.hpp"

namespace ufd {

struct DetectionResult {
  std::string dialog_id;
  FrustrationLabel label = FrustrationLabel::not_frustrated();
  std::optional<double> score;  // in [0, 1] when present
  std::string detector;
  std::optional<std::string> rationale;
};

// f: dialog -> {0, 1}. Implementations are immutable after construction and
// safe to call concurrently.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual DetectionResult detect(const Dialog& d) const = 0;
  virtual std::string name() const = 0;
};

// Outcome of one dialog in a batch run: either a result or the error text.
struct BatchItem {
  std::optional<DetectionResult> result;
  std::string error;

  bool ok() const { return result.has_value(); }
};

// Runs `det` over the corpus with at most `jobs` dialogs in flight. Errors
// are captured per dialog; output order follows the corpus.
std::vector<BatchItem> detect_batch(const Detector& det, std::span<const Dialog> corpus, std::size_t jobs);

// Prediction JSONL: {"id", "label", "score", "detector"}.
std::string to_prediction_line(const DetectionResult& r);
DetectionResult parse_prediction_line(std::string_view line, std::size_t line_no = 0);
std::vector<DetectionResult> load_predictions(const std::filesystem::path& path);
void save_predictions(const std::filesystem::path& path, std::span<const DetectionResult> preds);

}  // namespace ufd
