#include <gtest/gtest.h>

#include <cstdlib>
#include <json.hpp>
#include <mutex>

#include "embed_server.hpp"
#include "mock_llm_server.hpp"
#include "test_util.hpp"
#include "ufd/error.hpp"
#include "ufd/fileio.hpp"
#include "ufd/llm.hpp"

namespace ufd {
namespace {

using testing::label;
using testing::make_dialog;

std::size_t count(const std::string& hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

const Dialog kTarget = make_dialog("t1", {"How can I help?", "book a table", "For when?", "tonight", "Done."});
const std::vector<Dialog> kShots = {
    make_dialog("s1", {"Hello", "this is useless, get me a human"}, label(1)),
    make_dialog("s2", {"Hi there", "book for friday please"}, label(0)),
};

TEST(PromptTemplate, CanonicalMatchesShippedFiles) {
  const auto dir = std::filesystem::path(UFD_DATA_DIR) / "prompt";
  const auto c = PromptTemplate::canonical();
  EXPECT_EQ(c.task_description, read_file(dir / "task_description.txt"));
  EXPECT_EQ(c.domain_description, read_file(dir / "domain_description.txt"));
  EXPECT_EQ(c.output_instructions, read_file(dir / "output_instructions.txt"));
  const auto loaded = PromptTemplate::load(dir);
  EXPECT_EQ(loaded.task_description, c.task_description);
  EXPECT_THROW(PromptTemplate::load("/nonexistent"), IoError);
}

TEST(BuildPrompt, ContainsCanonicalBlocksInOrder) {
  const auto c = PromptTemplate::canonical();
  const auto p = build_prompt(kTarget, {});
  EXPECT_EQ(p.find(c.task_description), 0u);
  const auto d = p.find(c.domain_description);
  const auto conv = p.find("CONVERSATION: ");
  const auto out = p.rfind(c.output_instructions);
  ASSERT_NE(d, std::string::npos);
  ASSERT_NE(out, std::string::npos);
  EXPECT_LT(d, conv);
  EXPECT_LT(conv, out);
  EXPECT_EQ(out + c.output_instructions.size(), p.size());
  EXPECT_NE(p.find("determine if the user is frustrated"), std::string::npos);
  EXPECT_NE(p.find("Return a single number"), std::string::npos);
  EXPECT_NE(p.find("CONVERSATION: SYSTEM: How can I help?\nUSER: book a table\nSYSTEM: For when?\nUSER: tonight\n"
                   "SYSTEM: Done.\n\n"),
            std::string::npos);
}

TEST(BuildPrompt, ZeroShotHasNoExamples) {
  const auto p = build_prompt(kTarget, {});
  EXPECT_EQ(count(p, "EXAMPLE CONVERSATION:"), 0u);
  EXPECT_EQ(count(p, "LABEL:"), 0u);
  EXPECT_EQ(count("\n" + p, "\nCONVERSATION:"), 1u);
}

TEST(BuildPrompt, TwoShotHasExamplesInOrder) {
  const auto p = build_prompt(kTarget, kShots);
  EXPECT_EQ(count(p, "EXAMPLE CONVERSATION:\n"), 2u);
  const auto a = p.find("EXAMPLE CONVERSATION:\nSYSTEM: Hello\nUSER: this is useless, get me a human\nLABEL: 1\n\n");
  const auto b = p.find("EXAMPLE CONVERSATION:\nSYSTEM: Hi there\nUSER: book for friday please\nLABEL: 0\n\n");
  ASSERT_NE(a, std::string::npos);
  ASSERT_NE(b, std::string::npos);
  EXPECT_LT(a, b);
  EXPECT_LT(b, p.find("\nCONVERSATION: "));
  EXPECT_LT(p.find(PromptTemplate::canonical().domain_description), a);

  const std::vector<Dialog> swapped = {kShots[1], kShots[0]};
  EXPECT_GT(build_prompt(kTarget, swapped).find("LABEL: 1"), build_prompt(kTarget, swapped).find("LABEL: 0"));
}

TEST(BuildPrompt, DeterministicAndRejectsUnlabeledShots) {
  EXPECT_EQ(build_prompt(kTarget, kShots), build_prompt(kTarget, kShots));
  const std::vector<Dialog> bad = {make_dialog("u", {"a", "b"})};
  EXPECT_THROW(build_prompt(kTarget, bad), ValidationError);
}

TEST(ParseLabel, Cases) {
  EXPECT_EQ(parse_label("1"), FrustrationLabel::frustrated());
  EXPECT_EQ(parse_label(" 0\n"), FrustrationLabel::not_frustrated());
  EXPECT_EQ(parse_label("Label: 1."), FrustrationLabel::frustrated());
  EXPECT_EQ(parse_label("The answer is 0 (not 1)"), FrustrationLabel::not_frustrated());
  EXPECT_EQ(parse_label("10 reasons, verdict 1"), FrustrationLabel::frustrated());
  EXPECT_THROW(parse_label("unsure"), UnparseableResponse);
  EXPECT_THROW(parse_label(""), UnparseableResponse);
  EXPECT_THROW(parse_label("a1 b0 2"), UnparseableResponse);
  try {
    parse_label("maybe");
  } catch (const UnparseableResponse& e) {
    EXPECT_EQ(e.response(), "maybe");
  }
}

LlmConfig config_for(const std::string& url) {
  LlmConfig cfg;
  cfg.base_url = url;
  cfg.model = "test-model";
  cfg.api_key_env = "";
  cfg.timeout = std::chrono::milliseconds(5000);
  cfg.initial_backoff = std::chrono::milliseconds(1);
  return cfg;
}

TEST(LlmConfig, Validation) {
  EXPECT_THROW(LlmConfig{}.validate(), ValidationError);
  auto cfg = config_for("http://127.0.0.1:1");
  EXPECT_NO_THROW(cfg.validate());
  cfg.max_in_flight = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = config_for("http://127.0.0.1:1");
  cfg.model.clear();
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(HttpChatClient, RequestFormatAndAuth) {
  ::setenv("UFD_TEST_LLM_KEY", "sekrit", 1);
  std::mutex mu;
  nlohmann::json seen;
  std::string auth;
  testing::TestServer server("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lk(mu);
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"1"}}]})", "application/json");
  });
  auto cfg = config_for(server.url());
  cfg.api_key_env = "UFD_TEST_LLM_KEY";
  cfg.temperature = 0.0;
  HttpChatClient client(cfg);
  EXPECT_EQ(client.complete("hello prompt"), "1");
  EXPECT_EQ(auth, "Bearer sekrit");
  EXPECT_EQ(seen["model"], "test-model");
  EXPECT_EQ(seen["temperature"], 0.0);
  ASSERT_EQ(seen["messages"].size(), 1u);
  EXPECT_EQ(seen["messages"][0]["role"], "user");
  EXPECT_EQ(seen["messages"][0]["content"], "hello prompt");
}

TEST(HttpChatClient, MalformedResponsesAreProtocolErrors) {
  EXPECT_THROW(HttpChatClient::parse_content("not json"), ProtocolError);
  EXPECT_THROW(HttpChatClient::parse_content(R"({"choices":[]})"), ProtocolError);
  EXPECT_THROW(HttpChatClient::parse_content(R"({"choices":[{"message":{"content":5}}]})"), ProtocolError);
  EXPECT_EQ(HttpChatClient::parse_content(R"({"choices":[{"message":{"content":"0"}}]})"), "0");
}

mock::Script script(std::string default_response, std::vector<mock::Rule> rules, int delay_ms = 0) {
  mock::Script s;
  s.default_response = std::move(default_response);
  s.rules = std::move(rules);
  s.delay = std::chrono::milliseconds(delay_ms);
  return s;
}

TEST(LlmDetector, AgainstMockEndpoint) {
  mock::MockLlmServer server(script("0", {{"angry-user", {"1"}}, {"flaky", {"!500", "0"}}, {"dunno", {"unsure"}}}));
  server.start();
  const auto cfg = config_for(server.base_url());
  auto client = std::make_shared<HttpChatClient>(cfg);
  LlmDetector det(client, {});
  EXPECT_EQ(det.name(), "llm-zero-shot");

  const auto r1 = det.detect(make_dialog("a", {"Hi", "angry-user here"}));
  EXPECT_EQ(r1.label, FrustrationLabel::frustrated());
  EXPECT_FALSE(r1.score.has_value());
  EXPECT_EQ(r1.rationale, "1");
  EXPECT_EQ(r1.detector, "llm-zero-shot");

  const auto before = client->counters().retries;
  EXPECT_EQ(det.detect(make_dialog("b", {"Hi", "flaky"})).label, FrustrationLabel::not_frustrated());
  EXPECT_EQ(client->counters().retries - before, 1u);

  EXPECT_THROW(det.detect(make_dialog("c", {"Hi", "dunno"})), UnparseableResponse);
  const auto stats = server.stats();
  EXPECT_EQ(stats.status_counts.at(500), 1u);
  ASSERT_GE(stats.prompts.size(), 2u);
  const auto& reprompt = stats.prompts.back();
  EXPECT_EQ(reprompt.substr(reprompt.size() - kReprompt.size()), kReprompt);
  EXPECT_EQ(reprompt.substr(0, reprompt.size() - kReprompt.size() - 2), stats.prompts[stats.prompts.size() - 2]);
}

TEST(LlmDetector, RepromptRecovers) {
  mock::MockLlmServer server(script("0", {{"x", {"I think so", "1"}}}));
  server.start();
  LlmDetector det(std::make_shared<HttpChatClient>(config_for(server.base_url())), kShots);
  EXPECT_EQ(det.name(), "llm-two-shot");
  const auto r = det.detect(make_dialog("a", {"Hi", "x"}));
  EXPECT_EQ(r.label, FrustrationLabel::frustrated());
  EXPECT_EQ(server.stats().requests, 2u);
}

TEST(LlmDetector, ClientErrorsSurface) {
  mock::MockLlmServer server(script("!400", {}));
  server.start();
  LlmDetector det(std::make_shared<HttpChatClient>(config_for(server.base_url())), {});
  EXPECT_THROW(det.detect(kTarget), HttpError);
  EXPECT_EQ(server.stats().requests, 1u);

  auto cfg = config_for("http://127.0.0.1:" + std::to_string(testing::closed_port()));
  cfg.max_retries = 1;
  EXPECT_THROW(detect_llm(kTarget, cfg, {}), TransportError);
}

TEST(LlmDetector, InFlightBounded) {
  mock::MockLlmServer server(script("1", {}, 20), 32);
  server.start();
  auto cfg = config_for(server.base_url());
  cfg.max_in_flight = 3;
  LlmDetector det(std::make_shared<HttpChatClient>(cfg), {});
  Corpus c;
  for (int i = 0; i < 24; ++i) c.push_back(make_dialog("d" + std::to_string(i), {"Hi", "hello " + std::to_string(i)}));
  const auto out = detect_batch(det, c, 12);
  for (const auto& item : out) {
    ASSERT_TRUE(item.ok());
    EXPECT_TRUE(item.result->label.is_frustrated());
  }
  EXPECT_LE(server.stats().max_concurrent, 3u);
  EXPECT_GE(server.stats().max_concurrent, 2u);
}

TEST(LoadShots, RequiresLabels) {
  testing::TempDir dir;
  const auto ok = dir.write("s.jsonl", to_json_line(kShots[0]) + "\n" + to_json_line(kShots[1]) + "\n");
  EXPECT_EQ(load_shots(ok).size(), 2u);
  const auto bad = dir.write("b.jsonl", to_json_line(kTarget) + "\n");
  EXPECT_THROW(load_shots(bad), ValidationError);
}

}  // namespace
}  // namespace ufd
