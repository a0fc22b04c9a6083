#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace copyguard {

// Fixed-point decimal with 9 fractional digits (lamport / token base-unit
// granularity). Backed by a signed 128-bit integer so sums over whole ledgers
// never overflow; all comparisons are exact.
class Decimal {
public:
    using Raw = __int128;

    static constexpr int kScale = 9;
    static constexpr std::int64_t kUnit = 1'000'000'000;

    constexpr Decimal() = default;

    static constexpr Decimal from_raw(Raw raw) {
        Decimal d;
        d.raw_ = raw;
        return d;
    }
    static constexpr Decimal from_int(std::int64_t units) { return from_raw(Raw{units} * kUnit); }

    // Accepts `[+-]digits[.digits][(e|E)[+-]digits]`. Values needing more than
    // nine fractional digits are rejected rather than rounded.
    static std::optional<Decimal> try_parse(std::string_view text);
    static Decimal parse(std::string_view text);  // throws std::invalid_argument

    constexpr Raw raw() const { return raw_; }

    // Shortest exact rendering: no exponent, no trailing fractional zeros.
    std::string to_string() const;
    double to_double() const;

    constexpr bool is_zero() const { return raw_ == 0; }
    constexpr bool is_negative() const { return raw_ < 0; }
    constexpr bool is_positive() const { return raw_ > 0; }

    constexpr Decimal abs() const { return from_raw(raw_ < 0 ? -raw_ : raw_); }

    constexpr Decimal operator-() const { return from_raw(-raw_); }
    constexpr Decimal& operator+=(Decimal o) {
        raw_ += o.raw_;
        return *this;
    }
    constexpr Decimal& operator-=(Decimal o) {
        raw_ -= o.raw_;
        return *this;
    }
    friend constexpr Decimal operator+(Decimal a, Decimal b) { return a += b; }
    friend constexpr Decimal operator-(Decimal a, Decimal b) { return a -= b; }
    friend constexpr Decimal operator*(Decimal a, std::int64_t n) { return from_raw(a.raw_ * n); }

    friend constexpr bool operator==(Decimal a, Decimal b) { return a.raw_ == b.raw_; }
    friend constexpr std::strong_ordering operator<=>(Decimal a, Decimal b) {
        return a.raw_ <=> b.raw_;
    }

private:
    Raw raw_ = 0;
};

}  // namespace copyguard
