#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace freqent {

enum class ErrorKind {
  InvalidArgument,
  InvalidState,
  EmptyState,
  OutOfRange,
  NoSolution,
  NumericalFailure,
  InvalidInput,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace freqent
