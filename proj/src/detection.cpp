#include "ufd/detection.hpp"

#include <json.hpp>
#include <sstream>

#include "ufd/error.hpp"
#include "ufd/fileio.hpp"
#include "ufd/parallel.hpp"

namespace ufd {

using nlohmann::json;

std::vector<BatchItem> detect_batch(const Detector& det, std::span<const Dialog> corpus, std::size_t jobs) {
  std::vector<BatchItem> out(corpus.size());
  parallel_for(corpus.size(), jobs, [&](std::size_t i) {
    try {
      out[i].result = det.detect(corpus[i]);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

std::string to_prediction_line(const DetectionResult& r) {
  nlohmann::ordered_json j;
  j["id"] = r.dialog_id;
  j["label"] = r.label.value();
  j["score"] = r.score ? nlohmann::ordered_json(*r.score) : nullptr;
  j["detector"] = r.detector;
  return j.dump();
}

DetectionResult parse_prediction_line(std::string_view line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
  }
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string())
    throw ValidationError("prediction needs a string \"id\"", line_no);
  if (!j.contains("label") || !j["label"].is_number_integer())
    throw ValidationError("prediction needs an integer \"label\"", line_no);
  DetectionResult r;
  r.dialog_id = j["id"].get<std::string>();
  try {
    r.label = FrustrationLabel::from_int(j["label"].get<long long>());
  } catch (const ValidationError& e) {
    throw ValidationError(e.what(), line_no);
  }
  if (j.contains("score") && !j["score"].is_null()) {
    if (!j["score"].is_number()) throw ValidationError("\"score\" must be a number or null", line_no);
    const double s = j["score"].get<double>();
    if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("\"score\" must lie in [0, 1]", line_no);
    r.score = s;
  }
  if (j.contains("detector") && j["detector"].is_string()) r.detector = j["detector"].get<std::string>();
  return r;
}

std::vector<DetectionResult> load_predictions(const std::filesystem::path& path) {
  std::vector<DetectionResult> out;
  std::istringstream in(read_file(path));
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_prediction_line(line, n));
  }
  return out;
}

void save_predictions(const std::filesystem::path& path, std::span<const DetectionResult> preds) {
  std::string out;
  for (const auto& p : preds) {
    out += to_prediction_line(p);
    out += '\n';
  }
  write_file_atomic(path, out);
}

}  // namespace ufd
