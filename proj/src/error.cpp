#include "entvec/error.hpp"

namespace entvec {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kInvalidDistribution: return "invalid-distribution";
    case ErrorKind::kUndefinedDistance: return "undefined-distance";
    case ErrorKind::kUnsupported: return "unsupported";
    case ErrorKind::kDegenerateInput: return "degenerate-input";
    case ErrorKind::kParse: return "parse-error";
    case ErrorKind::kIo: return "io-error";
  }
  return "unknown";
}

ParseError::ParseError(const std::string& source, std::size_t line,
                       const std::string& msg)
    : Error(ErrorKind::kParse,
            source + ":" + std::to_string(line) + ": " + msg),
      line_(line) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace entvec
