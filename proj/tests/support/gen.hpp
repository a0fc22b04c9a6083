#pragma once

// Seeded generators for property tests.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "copyguard/common/decimal.hpp"

namespace cgtest {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
    }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    // Decimal on the 9-digit grid in [lo, hi] (units), `digits` fractional digits kept.
    copyguard::Decimal decimal(std::int64_t lo, std::int64_t hi, int digits = 9) {
        std::int64_t step = 1;
        for (int i = digits; i < 9; ++i) step *= 10;
        const std::int64_t lo_raw = lo * copyguard::Decimal::kUnit / step;
        const std::int64_t hi_raw = hi * copyguard::Decimal::kUnit / step;
        return copyguard::Decimal::from_raw(static_cast<__int128>(integer(lo_raw, hi_raw)) * step);
    }

    template <class T>
    const T& pick(const std::vector<T>& xs) {
        return xs[static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(xs.size()) - 1))];
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace cgtest
