#include "freqent/errors.hpp"

namespace freqent {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidState: return "invalid-state";
    case ErrorKind::EmptyState: return "empty-state";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::NoSolution: return "no-solution";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::InvalidInput: return "invalid-input";
  }
  return "unknown";
}

}  // namespace freqent
