#pragma once

#include <string>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "copyguard/common/decimal.hpp"

namespace copyguard {

// 50-significant-digit decimal floating point used for all curve math.
// Expression templates are disabled so `auto` and lambdas behave like doubles.
using Real = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<50>,
                                           boost::multiprecision::et_off>;

inline Real to_real(Decimal d) {
    // raw fits comfortably in long long for every quantity we accept.
    return Real(static_cast<long long>(d.raw())) / Real(Decimal::kUnit);
}

// Rounds half away from zero onto the 9-digit grid.
Decimal to_decimal(const Real& value);

// Truncates toward zero onto the 9-digit grid.
Decimal to_decimal_floor(const Real& value);

inline double to_double(const Real& value) { return value.convert_to<double>(); }

// Full-precision rendering (used in JSON reports and golden tests).
std::string to_string(const Real& value, int digits = 20);

}  // namespace copyguard
