#include "copyguard/common/real.hpp"

#include <limits>
#include <stdexcept>

namespace copyguard {

namespace {

Decimal scaled_to_decimal(const Real& scaled) {
    static const Real kLimit(std::numeric_limits<long long>::max());
    if (boost::multiprecision::abs(scaled) >= kLimit) {
        throw std::overflow_error("value outside Decimal range: " + scaled.str());
    }
    return Decimal::from_raw(scaled.convert_to<long long>());
}

}  // namespace

Decimal to_decimal(const Real& value) {
    const Real scaled = value * Real(Decimal::kUnit);
    const Real rounded = scaled < 0 ? -boost::multiprecision::floor(-scaled + Real("0.5"))
                                    : boost::multiprecision::floor(scaled + Real("0.5"));
    return scaled_to_decimal(rounded);
}

Decimal to_decimal_floor(const Real& value) {
    return scaled_to_decimal(boost::multiprecision::trunc(value * Real(Decimal::kUnit)));
}

std::string to_string(const Real& value, int digits) {
    return value.str(digits, std::ios_base::fmtflags(0));
}

}  // namespace copyguard
