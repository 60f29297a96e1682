#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace entvec {

enum class ErrorKind {
  kInvalidArgument,
  kInvalidDistribution,
  kUndefinedDistance,
  kUnsupported,
  kDegenerateInput,
  kParse,
  kIo,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Parse errors carry the 1-based line number of the offending input line
// (0 when the problem is not tied to a line, e.g. an empty file).
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& msg);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace entvec
