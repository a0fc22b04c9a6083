#include "copyguard/common/decimal.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <stdexcept>

namespace copyguard {

namespace {

using Raw = Decimal::Raw;

// Largest magnitude we accept; keeps headroom for products in detectors.
constexpr Raw kMaxRaw = Raw{std::numeric_limits<std::int64_t>::max()} * 1'000'000;

}  // namespace

std::optional<Decimal> Decimal::try_parse(std::string_view text) {
    std::size_t pos = 0;
    const std::size_t n = text.size();
    bool negative = false;
    if (pos < n && (text[pos] == '+' || text[pos] == '-')) {
        negative = text[pos] == '-';
        ++pos;
    }

    std::string digits;  // all mantissa digits, integer part then fraction
    int frac_digits = 0;
    bool seen_digit = false;
    bool seen_point = false;
    for (; pos < n; ++pos) {
        const char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            seen_digit = true;
            if (seen_point) ++frac_digits;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) return std::nullopt;

    int exponent = 0;
    if (pos < n && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        bool exp_negative = false;
        if (pos < n && (text[pos] == '+' || text[pos] == '-')) {
            exp_negative = text[pos] == '-';
            ++pos;
        }
        if (pos >= n) return std::nullopt;
        for (; pos < n; ++pos) {
            const char c = text[pos];
            if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
            exponent = exponent * 10 + (c - '0');
            if (exponent > 60) return std::nullopt;
        }
        if (exp_negative) exponent = -exponent;
    }
    if (pos != n) return std::nullopt;

    // value = digits * 10^(exponent - frac_digits); we need digits * 10^(shift)
    // with shift = exponent - frac_digits + kScale.
    int shift = exponent - frac_digits + kScale;
    while (shift < 0) {
        if (digits.empty() || digits.back() != '0') return std::nullopt;  // sub-lamport
        digits.pop_back();
        ++shift;
    }

    Raw raw = 0;
    auto push_digit = [&](int d) -> bool {
        raw = raw * 10 + d;
        return raw <= kMaxRaw;
    };
    for (char c : digits) {
        if (!push_digit(c - '0')) return std::nullopt;
    }
    for (int i = 0; i < shift; ++i) {
        if (!push_digit(0)) return std::nullopt;
    }
    return from_raw(negative ? -raw : raw);
}

Decimal Decimal::parse(std::string_view text) {
    auto value = try_parse(text);
    if (!value) throw std::invalid_argument("invalid decimal: '" + std::string(text) + "'");
    return *value;
}

std::string Decimal::to_string() const {
    Raw v = raw_ < 0 ? -raw_ : raw_;
    Raw integer = v / kUnit;
    Raw fraction = v % kUnit;

    std::string int_part;
    do {
        int_part.push_back(static_cast<char>('0' + static_cast<int>(integer % 10)));
        integer /= 10;
    } while (integer > 0);
    std::reverse(int_part.begin(), int_part.end());

    std::string out = raw_ < 0 ? "-" + int_part : int_part;
    if (fraction != 0) {
        std::string frac(kScale, '0');
        for (int i = kScale - 1; i >= 0; --i) {
            frac[static_cast<std::size_t>(i)] = static_cast<char>('0' + static_cast<int>(fraction % 10));
            fraction /= 10;
        }
        while (!frac.empty() && frac.back() == '0') frac.pop_back();
        out += "." + frac;
    }
    return out;
}

double Decimal::to_double() const {
    const Raw integer = raw_ / kUnit;
    const Raw fraction = raw_ % kUnit;
    return static_cast<double>(integer) + static_cast<double>(fraction) / static_cast<double>(kUnit);
}

}  // namespace copyguard
