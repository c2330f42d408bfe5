#pragma once

#include <stdexcept>
#include <string>

namespace ktl {

// Failure categories. The CLI maps each kind to a stable exit code.
enum class ErrorKind {
  kValidation,
  kInsufficientNegatives,
  kIo,
  kParse,
  kSchema,
  kLength,
  kConfig,
  kEmptyTarget,
  kDivergence,
  kGradcheck,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace ktl
