#include "ufd/http.hpp"

#include <cstdlib>
#include <httplib.h>
#include <thread>

#include "ufd/error.hpp"

namespace ufd {

BaseUrl BaseUrl::parse(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ValidationError("URL needs a scheme: \"" + url + "\"");
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ValidationError("unsupported URL scheme: \"" + url + "\"");
  const auto path_start = url.find('/', scheme_end + 3);
  BaseUrl b;
  b.origin = url.substr(0, path_start);
  if (b.origin.size() <= scheme_end + 3) throw ValidationError("URL has no host: \"" + url + "\"");
  if (path_start != std::string::npos) b.path = url.substr(path_start);
  while (!b.path.empty() && b.path.back() == '/') b.path.pop_back();
  return b;
}

JsonHttpClient::JsonHttpClient(const std::string& base_url, std::chrono::milliseconds timeout,
                               std::optional<std::string> bearer_token, RetryPolicy retry)
    : base_(BaseUrl::parse(base_url)), timeout_(timeout), token_(std::move(bearer_token)), retry_(retry) {
  if (timeout_.count() <= 0) throw ValidationError("HTTP timeout must be positive");
  if (retry_.max_retries < 0) throw ValidationError("max_retries must be >= 0");
}

std::string JsonHttpClient::post_json(const std::string& path, const std::string& body) const {
  httplib::Client cli(base_.origin);
  const auto secs = timeout_.count() / 1000;
  const auto usecs = (timeout_.count() % 1000) * 1000;
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (token_) headers.emplace("Authorization", "Bearer " + *token_);

  auto backoff = retry_.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 0) {
      retries_.fetch_add(1);
      std::this_thread::sleep_for(backoff);
      backoff = std::chrono::milliseconds(
          static_cast<long long>(static_cast<double>(backoff.count()) * retry_.backoff_multiplier));
    }
    attempts_.fetch_add(1);
    const bool last = attempt >= retry_.max_retries;
    auto res = cli.Post(base_.path + path, headers, body, "application/json");
    if (!res) {
      if (last)
        throw TransportError("POST " + base_.origin + base_.path + path + " failed: " +
                             httplib::to_string(res.error()));
      continue;
    }
    if (res->status >= 200 && res->status < 300) return res->body;
    if (res->status >= 500 && !last) continue;
    throw HttpError(res->status, res->body);
  }
}

HttpCounters JsonHttpClient::counters() const { return {attempts_.load(), retries_.load()}; }

std::optional<std::string> env_value(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

}  // namespace ufd
