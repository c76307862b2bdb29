#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace ufd::mock {

// Scripted chat-completions endpoint for tests and offline demos.
//
// Script JSON:
//   {"default": "0", "delay_ms": 0,
//    "rules": [{"match": "<substring>", "responses": ["!500", "1"]}]}
//
// A request is routed to the first rule whose `match` occurs in the target
// conversation (the text after the last "CONVERSATION: " marker of the
// prompt). Each rule replays its responses in order and repeats the last
// one. "!<code>" answers with that HTTP status instead of a completion.
struct Rule {
  std::string match;
  std::vector<std::string> responses;
};

struct Script {
  std::string default_response = "0";
  std::chrono::milliseconds delay{0};
  std::vector<Rule> rules;

  static Script parse(std::string_view json_text);
};

struct ServerStats {
  std::size_t requests = 0;
  std::size_t max_concurrent = 0;
  std::map<int, std::size_t> status_counts;
  std::vector<std::string> prompts;  // arrival order
};

class MockLlmServer {
 public:
  explicit MockLlmServer(Script script, std::size_t worker_threads = 16);
  ~MockLlmServer();
  MockLlmServer(const MockLlmServer&) = delete;
  MockLlmServer& operator=(const MockLlmServer&) = delete;

  // Binds to an ephemeral port on 127.0.0.1 unless `port` is given and
  // serves on a background thread. Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Blocks serving on the calling thread.
  bool listen_blocking(const std::string& host, int port);
  void stop();

  std::string base_url() const;
  ServerStats stats() const;

 private:
  void install_routes();

  Script script_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::string host_;

  mutable std::mutex mu_;
  std::vector<std::size_t> cursors_;
  ServerStats stats_;
  std::atomic<std::size_t> active_{0};
};

}  // namespace ufd::mock
