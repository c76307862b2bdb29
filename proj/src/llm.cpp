#include "ufd/llm.hpp"

#include <algorithm>
#include <cctype>
#include <json.hpp>

#include "ufd/error.hpp"
#include "ufd/fileio.hpp"

namespace ufd {

namespace {

constexpr std::string_view kTaskDescription = R"PROMPT(In this task, you are given a conversation between a user and a task-oriented dialog system. Your goal is to determine if the user is frustrated during the conversation.

User frustration is often expressed through negative emotions, such as anger, irritation, or dissatisfaction. Some cues indicating frustration include:
- Profanity or abusive language directed at the system.
- Hostility or irritation toward the assistant.
- Direct expressions of frustration, such as complaints about the system's performance or the conversation itself.

Frustration can also be more subtle and does not always involve negative language. A user may become frustrated when the system is unable to handle the conversation effectively or help the user accomplish their task. This may lead to breakdowns in the dialogue, where the user either disengages or expresses a desire to stop the interaction.

To classify frustration, consider the following signs:
- Repetition of requests or questions due to the system's failure to resolve the user's issue.
- Use of negation, where the user rejects the system's suggestions or responses.
- Long, unresolved conversations where the user’s task remains incomplete.
- The user's general dissatisfaction with the system’s responses, even without overt hostility.)PROMPT";

constexpr std::string_view kDomainDescription = R"PROMPT(The conversation you are analyzing occurs in one of these two domains:
- Receptionist system responsible for transferring calls to the appropriate department or agent. The system is expected to ask clarifying questions to help find the correct target.
- Booking agent that is negotiating the time slot for an appointment. We expect some back and forth between the user and the system to find a slot that works well for the user.)PROMPT";

constexpr std::string_view kOutputInstructions = R"PROMPT(Return a single number:
- 0 if the user is not frustrated
- 1 if the user is frustrated)PROMPT";

}  // namespace

PromptTemplate PromptTemplate::canonical() {
  return {std::string(kTaskDescription), std::string(kDomainDescription), std::string(kOutputInstructions)};
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& dir) {
  return {read_file(dir / "task_description.txt"), read_file(dir / "domain_description.txt"),
          read_file(dir / "output_instructions.txt")};
}

std::string build_prompt(const Dialog& d, std::span<const Dialog> shots, const PromptTemplate& tmpl) {
  std::string p = tmpl.task_description;
  p += "\n\n";
  p += tmpl.domain_description;
  p += "\n\n";
  for (const auto& shot : shots) {
    if (!shot.gold_label())
      throw ValidationError("exemplar dialog \"" + shot.id() + "\" has no label");
    p += "EXAMPLE CONVERSATION:\n";
    p += format_history(shot);
    p += "\nLABEL: ";
    p += shot.gold_label()->is_frustrated() ? '1' : '0';
    p += "\n\n";
  }
  p += "CONVERSATION: ";
  p += format_history(d);
  p += "\n\n";
  p += tmpl.output_instructions;
  return p;
}

FrustrationLabel parse_label(std::string_view response) {
  std::size_t i = 0;
  while (i < response.size()) {
    if (!std::isalnum(static_cast<unsigned char>(response[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < response.size() && std::isalnum(static_cast<unsigned char>(response[j]))) ++j;
    const auto tok = response.substr(i, j - i);
    if (tok == "0") return FrustrationLabel::not_frustrated();
    if (tok == "1") return FrustrationLabel::frustrated();
    i = j;
  }
  throw UnparseableResponse(std::string(response));
}

void LlmConfig::validate() const {
  if (base_url.empty()) throw ValidationError("LLM base URL is not set (--llm-url or LLM_BASE_URL)");
  if (model.empty()) throw ValidationError("LLM model name is not set (--model)");
  if (!(temperature >= 0.0)) throw ValidationError("temperature must be >= 0");
  if (timeout.count() <= 0) throw ValidationError("LLM timeout must be positive");
  if (max_retries < 0) throw ValidationError("max_retries must be >= 0");
  if (max_in_flight < 1) throw ValidationError("max_in_flight must be >= 1");
}

namespace {

std::optional<std::string> api_key(const LlmConfig& cfg) {
  if (cfg.api_key_env.empty()) return std::nullopt;
  return env_value(cfg.api_key_env.c_str());
}

const LlmConfig& validated(const LlmConfig& cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

HttpChatClient::HttpChatClient(LlmConfig cfg)
    : cfg_(validated(cfg)),
      http_(cfg_.base_url, cfg_.timeout, api_key(cfg_),
            RetryPolicy{cfg_.max_retries, cfg_.initial_backoff, 2.0}),
      in_flight_(std::clamp<std::ptrdiff_t>(cfg_.max_in_flight, 1, kMaxInFlightCap)) {}

std::string HttpChatClient::request_body(const LlmConfig& cfg, const std::string& prompt) {
  nlohmann::ordered_json j;
  j["model"] = cfg.model;
  j["temperature"] = cfg.temperature;
  j["messages"] = nlohmann::ordered_json::array({{{"role", "user"}, {"content", prompt}}});
  return j.dump();
}

std::string HttpChatClient::parse_content(std::string_view response_body) {
  try {
    const auto j = nlohmann::json::parse(response_body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw ProtocolError("choices[0].message.content is not a string");
    return content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed chat completion response: ") + e.what());
  }
}

std::string HttpChatClient::complete(const std::string& prompt) const {
  in_flight_.acquire();
  std::string body;
  try {
    body = http_.post_json("/v1/chat/completions", request_body(cfg_, prompt));
  } catch (...) {
    in_flight_.release();
    throw;
  }
  in_flight_.release();
  return parse_content(body);
}

LlmDetector::LlmDetector(std::shared_ptr<const ChatClient> client, std::vector<Dialog> shots, PromptTemplate tmpl)
    : client_(std::move(client)), shots_(std::move(shots)), tmpl_(std::move(tmpl)) {
  if (!client_) throw ValidationError("LlmDetector needs a chat client");
  for (const auto& s : shots_)
    if (!s.gold_label()) throw ValidationError("exemplar dialog \"" + s.id() + "\" has no label");
}

std::string LlmDetector::name() const {
  if (shots_.empty()) return "llm-zero-shot";
  if (shots_.size() == 2) return "llm-two-shot";
  return "llm-" + std::to_string(shots_.size()) + "-shot";
}

DetectionResult LlmDetector::detect(const Dialog& d) const {
  const auto prompt = build_prompt(d, shots_, tmpl_);
  DetectionResult r;
  r.dialog_id = d.id();
  r.detector = name();
  auto reply = client_->complete(prompt);
  try {
    r.label = parse_label(reply);
  } catch (const UnparseableResponse&) {
    reply = client_->complete(prompt + "\n\n" + std::string(kReprompt));
    r.label = parse_label(reply);
  }
  r.rationale = std::move(reply);
  return r;
}

DetectionResult detect_llm(const Dialog& d, const LlmConfig& cfg, std::span<const Dialog> shots) {
  LlmDetector det(std::make_shared<HttpChatClient>(cfg), {shots.begin(), shots.end()});
  return det.detect(d);
}

std::vector<Dialog> load_shots(const std::filesystem::path& path) {
  auto shots = load_corpus(path);
  for (const auto& s : shots)
    if (!s.gold_label()) throw ValidationError("exemplar dialog \"" + s.id() + "\" in " + path.string() + " has no label");
  return shots;
}

}  // namespace ufd
