#include "mock_llm_server.hpp"

#include <httplib.h>
#include <json.hpp>
#include <stdexcept>

namespace ufd::mock {

using nlohmann::json;

Script Script::parse(std::string_view json_text) {
  const auto j = json::parse(json_text);
  Script s;
  s.default_response = j.value("default", s.default_response);
  s.delay = std::chrono::milliseconds(j.value("delay_ms", 0));
  if (j.contains("rules")) {
    for (const auto& r : j.at("rules")) {
      Rule rule;
      rule.match = r.at("match").get<std::string>();
      rule.responses = r.at("responses").get<std::vector<std::string>>();
      if (rule.responses.empty()) throw std::invalid_argument("mock rule \"" + rule.match + "\" has no responses");
      s.rules.push_back(std::move(rule));
    }
  }
  return s;
}

MockLlmServer::MockLlmServer(Script script, std::size_t worker_threads)
    : script_(std::move(script)), server_(std::make_unique<httplib::Server>()), cursors_(script_.rules.size(), 0) {
  server_->new_task_queue = [worker_threads] { return new httplib::ThreadPool(worker_threads); };
  install_routes();
}

MockLlmServer::~MockLlmServer() { stop(); }

void MockLlmServer::install_routes() {
  server_->Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
    const std::size_t now = ++active_;
    std::string content;
    try {
      content = json::parse(req.body).at("messages").at(0).at("content").get<std::string>();
    } catch (const std::exception& e) {
      --active_;
      res.status = 400;
      res.set_content(std::string("bad request: ") + e.what(), "text/plain");
      std::lock_guard lock(mu_);
      ++stats_.requests;
      ++stats_.status_counts[400];
      return;
    }
    const auto marker = content.rfind("CONVERSATION: ");
    const std::string_view target =
        marker == std::string::npos ? std::string_view(content) : std::string_view(content).substr(marker);

    std::string reply = script_.default_response;
    {
      std::lock_guard lock(mu_);
      ++stats_.requests;
      stats_.max_concurrent = std::max(stats_.max_concurrent, now);
      stats_.prompts.push_back(content);
      for (std::size_t i = 0; i < script_.rules.size(); ++i) {
        if (target.find(script_.rules[i].match) == std::string_view::npos) continue;
        const auto& rs = script_.rules[i].responses;
        reply = rs[std::min(cursors_[i], rs.size() - 1)];
        ++cursors_[i];
        break;
      }
    }
    if (script_.delay.count() > 0) std::this_thread::sleep_for(script_.delay);

    int status = 200;
    if (reply.size() > 1 && reply[0] == '!') {
      status = std::stoi(reply.substr(1));
      res.status = status;
      res.set_content("{\"error\": \"scripted failure\"}", "application/json");
    } else {
      json body = {{"id", "mock"},
                   {"object", "chat.completion"},
                   {"choices", json::array({{{"index", 0},
                                             {"message", {{"role", "assistant"}, {"content", reply}}},
                                             {"finish_reason", "stop"}}})}};
      res.set_content(body.dump(), "application/json");
    }
    {
      std::lock_guard lock(mu_);
      ++stats_.status_counts[status];
    }
    --active_;
  });
}

int MockLlmServer::start(const std::string& host, int port) {
  host_ = host;
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ <= 0) throw std::runtime_error("mock LLM server could not bind " + host);
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

bool MockLlmServer::listen_blocking(const std::string& host, int port) {
  host_ = host;
  port_ = port;
  return server_->listen(host, port);
}

void MockLlmServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockLlmServer::base_url() const { return "http://" + host_ + ":" + std::to_string(port_); }

ServerStats MockLlmServer::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

}  // namespace ufd::mock
