#pragma once

#include <string>

namespace freqent {

// 12 significant digits, '.' decimal separator; fixed notation for
// |x| in [1e-3, 1e6), scientific otherwise. Zero prints as "0".
std::string format_number(double x);

}  // namespace freqent
