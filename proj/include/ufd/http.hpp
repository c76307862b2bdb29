#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <optional>
#include <string>

namespace ufd {

struct RetryPolicy {
  // Retries after the first attempt; applied to transport errors and 5xx.
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{250};
  double backoff_multiplier = 2.0;
};

// "http://host:port/prefix" split into what cpp-httplib wants.
struct BaseUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // prefix without trailing slash, possibly empty

  static BaseUrl parse(const std::string& url);  // throws ValidationError
};

struct HttpCounters {
  std::size_t attempts = 0;
  std::size_t retries = 0;
};

// POSTs JSON bodies with a bearer token, a per-request timeout and
// exponential backoff. Safe to call from several threads.
class JsonHttpClient {
 public:
  JsonHttpClient(const std::string& base_url, std::chrono::milliseconds timeout,
                 std::optional<std::string> bearer_token, RetryPolicy retry);

  // Returns the response body of the first 2xx answer. Throws TransportError
  // or HttpError once retries are exhausted; 4xx is not retried.
  std::string post_json(const std::string& path, const std::string& body) const;

  HttpCounters counters() const;
  const BaseUrl& base_url() const { return base_; }

 private:
  BaseUrl base_;
  std::chrono::milliseconds timeout_;
  std::optional<std::string> token_;
  RetryPolicy retry_;
  mutable std::atomic<std::size_t> attempts_{0};
  mutable std::atomic<std::size_t> retries_{0};
};

// Value of an environment variable, nullopt when unset or empty.
std::optional<std::string> env_value(const char* name);

}  // namespace ufd
