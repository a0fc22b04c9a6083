#pragma once

#include <optional>
#include <span>
#include <vector>

namespace copyguard::stats {

double mean(std::span<const double> values);

// Sample standard deviation (n - 1 denominator); nullopt when n < 2.
std::optional<double> sample_stddev(std::span<const double> values);

// Linear-interpolation percentile (the "linear" method of common numeric
// libraries) for p in [0, 100]. nullopt on empty input.
std::optional<double> percentile(std::vector<double> values, double p);

}  // namespace copyguard::stats
