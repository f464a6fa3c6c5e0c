#include "smc/summary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smc/error.hpp"

namespace smc {
namespace {

void check(std::span<const double> values, std::span<const double> weights) {
  if (values.empty()) throw ConfigError("summary of an empty sample");
  if (values.size() != weights.size()) throw ConfigError("values and weights differ in length");
}

double total(std::span<const double> weights) {
  const double s = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(s > 0.0) || !std::isfinite(s)) throw NumericalError("weights must have a positive finite sum");
  return s;
}

}  // namespace

std::vector<double> weighted_quantiles(std::span<const double> values, std::span<const double> weights,
                                       std::span<const double> qs) {
  check(values, weights);
  const double sum = total(weights);
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> cdf(order.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    acc += weights[order[i]];
    cdf[i] = acc / sum;
  }
  std::vector<double> out;
  out.reserve(qs.size());
  for (double q : qs) {
    if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile level must lie in [0, 1]");
    // Slack absorbs rounding in the running sum, so uniform weights give
    // exact order statistics.
    auto it = std::lower_bound(cdf.begin(), cdf.end(), q - 1e-12);
    std::size_t i = it == cdf.end() ? cdf.size() - 1 : static_cast<std::size_t>(it - cdf.begin());
    while (weights[order[i]] == 0.0 && i + 1 < cdf.size()) ++i;
    out.push_back(values[order[i]]);
  }
  return out;
}

double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q) {
  const double qs[] = {q};
  return weighted_quantiles(values, weights, qs).front();
}

double weighted_mean(std::span<const double> values, std::span<const double> weights) {
  check(values, weights);
  const double sum = total(weights);
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (weights[i] != 0.0) m += weights[i] * values[i];
  return m / sum;
}

double weighted_sd(std::span<const double> values, std::span<const double> weights) {
  const double m = weighted_mean(values, weights);
  const double sum = total(weights);
  double v = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (weights[i] != 0.0) v += weights[i] * (values[i] - m) * (values[i] - m);
  return std::sqrt(v / sum);
}

double mean(std::span<const double> values) {
  if (values.empty()) throw ConfigError("summary of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double v = 0.0;
  for (double x : values) v += (x - m) * (x - m);
  return std::sqrt(v / static_cast<double>(values.size() - 1));
}

Histogram histogram(std::span<const double> values, std::span<const double> weights, std::size_t bins) {
  check(values, weights);
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
  h.counts.assign(bins, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto b = static_cast<std::size_t>((values[i] - lo) / (hi - lo) * static_cast<double>(bins));
    h.counts[std::min(b, bins - 1)] += weights[i];
  }
  return h;
}

}  // namespace smc
