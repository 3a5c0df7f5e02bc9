#include "freqent/numfmt.hpp"

#include <cmath>

#include <fmt/format.h>

namespace freqent {

std::string format_number(double x) {
  if (x == 0.0) return "0";
  if (!std::isfinite(x)) return fmt::format("{}", x);
  const double mag = std::abs(x);
  if (mag >= 1e-3 && mag < 1e6) return fmt::format("{:.12g}", x);
  return fmt::format("{:.11e}", x);
}

}  // namespace freqent
