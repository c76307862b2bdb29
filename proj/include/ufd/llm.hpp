#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ufd/detection.hpp"
#include "ufd/http.hpp"

namespace ufd {

// The three fixed blocks of the in-context-learning prompt. The conversation
// block is generated from the dialog.
struct PromptTemplate {
  std::string task_description;
  std::string domain_description;
  std::string output_instructions;

  static PromptTemplate canonical();
  // Reads task_description.txt, domain_description.txt and
  // output_instructions.txt from `dir`.
  static PromptTemplate load(const std::filesystem::path& dir);
};

inline constexpr std::string_view kReprompt = "Respond with only 0 or 1.";

// Blocks are separated by one blank line:
//   T, D, {EXAMPLE CONVERSATION:\n<history>\nLABEL: <y>}*, CONVERSATION: <history>, output
// Throws ValidationError if a shot is unlabeled.
std::string build_prompt(const Dialog& d, std::span<const Dialog> shots,
                         const PromptTemplate& tmpl = PromptTemplate::canonical());

// First standalone "0" or "1" token. Throws UnparseableResponse.
FrustrationLabel parse_label(std::string_view response);

struct LlmConfig {
  std::string base_url;
  std::string model;
  std::string api_key_env = "LLM_API_KEY";
  double temperature = 0.0;
  std::chrono::milliseconds timeout{60000};
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::ptrdiff_t max_in_flight = 4;

  void validate() const;  // throws ValidationError
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Sends `prompt` as a single user message and returns the reply text.
  virtual std::string complete(const std::string& prompt) const = 0;
};

// POST {base_url}/v1/chat/completions; reads choices[0].message.content.
class HttpChatClient final : public ChatClient {
 public:
  static constexpr std::ptrdiff_t kMaxInFlightCap = 256;

  explicit HttpChatClient(LlmConfig cfg);
  std::string complete(const std::string& prompt) const override;
  HttpCounters counters() const { return http_.counters(); }

  static std::string request_body(const LlmConfig& cfg, const std::string& prompt);
  static std::string parse_content(std::string_view response_body);  // throws ProtocolError

 private:
  LlmConfig cfg_;
  JsonHttpClient http_;
  mutable std::counting_semaphore<kMaxInFlightCap> in_flight_;
};

// Builds the prompt, queries the model and parses the label. One reprompt
// (prompt + kReprompt) is made when the first reply has no label; the raw
// reply is kept as the rationale and no score is reported.
class LlmDetector final : public Detector {
 public:
  LlmDetector(std::shared_ptr<const ChatClient> client, std::vector<Dialog> shots,
              PromptTemplate tmpl = PromptTemplate::canonical());

  DetectionResult detect(const Dialog& d) const override;
  std::string name() const override;

 private:
  std::shared_ptr<const ChatClient> client_;
  std::vector<Dialog> shots_;
  PromptTemplate tmpl_;
};

DetectionResult detect_llm(const Dialog& d, const LlmConfig& cfg, std::span<const Dialog> shots);

// Exemplar file: corpus JSONL where every record carries a label.
std::vector<Dialog> load_shots(const std::filesystem::path& path);

}  // namespace ufd
