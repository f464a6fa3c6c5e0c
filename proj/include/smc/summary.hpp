#pragma once

#include <span>
#include <vector>

namespace smc {

// Left-continuous inverse of the weighted empirical CDF: the smallest value
// whose cumulative weight reaches q. Values are sorted with ties broken by
// index. Weights need not be normalized.
double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q);
std::vector<double> weighted_quantiles(std::span<const double> values, std::span<const double> weights,
                                       std::span<const double> qs);

double weighted_mean(std::span<const double> values, std::span<const double> weights);
// Square root of the weighted second central moment.
double weighted_sd(std::span<const double> values, std::span<const double> weights);

// Plain mean and (K - 1)-denominator standard deviation.
double mean(std::span<const double> values);
double sample_sd(std::span<const double> values);

struct Histogram {
  std::vector<double> edges;   // bins + 1 entries
  std::vector<double> counts;  // summed weights per bin
};

// Equal-width bins over [min, max] of the values; the last bin is closed.
Histogram histogram(std::span<const double> values, std::span<const double> weights, std::size_t bins);

}  // namespace smc
