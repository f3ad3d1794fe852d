#pragma once

#include <stdexcept>
#include <string>

namespace fairflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A latency function was evaluated outside [0, inf) or built with bad parameters.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed graph data: unknown node/edge, broken path, unreachable sink.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A flow does not route exactly r_i for some commodity.
class FeasibilityError : public Error {
 public:
  using Error::Error;
};

/// Text input could not be parsed. Carries the source name and 1-based line.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, int line, const std::string& message)
      : Error(source + ":" + std::to_string(line) + ": " + message), source_(source), line_(line) {}

  const std::string& source() const { return source_; }
  int line() const { return line_; }

 private:
  std::string source_;
  int line_;
};

}  // namespace fairflow
