#pragma once

#include <stdexcept>
#include <string>

namespace ufd {

// Base of everything the library throws. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input syntax (JSON, numbers). `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class PatternError : public Error {
 public:
  using Error::Error;
};

// Connection refused, timeout, reset.
class TransportError : public Error {
 public:
  using Error::Error;
};

class HttpError : public Error {
 public:
  HttpError(int status, const std::string& body)
      : Error("HTTP " + std::to_string(status) +
              (body.empty() ? std::string() : ": " + body.substr(0, 200))),
        status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

// A well-formed HTTP response whose payload has the wrong shape.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class UnparseableResponse : public Error {
 public:
  explicit UnparseableResponse(const std::string& response)
      : Error("unparseable LLM response (no standalone 0/1 label): \"" +
              response.substr(0, 120) + "\""),
        response_(response) {}
  const std::string& response() const noexcept { return response_; }

 private:
  std::string response_;
};

// Numeric failure inside training or a degenerate statistic.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace ufd
