#include "smc/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "smc/error.hpp"

namespace smc {

ResampleMethod parse_resample_method(std::string_view name) {
  if (name == "systematic") return ResampleMethod::systematic;
  if (name == "multinomial") return ResampleMethod::multinomial;
  if (name == "residual") return ResampleMethod::residual;
  throw ConfigError("unknown resampling method '" + std::string(name) + "'");
}

std::string_view method_name(ResampleMethod method) {
  switch (method) {
    case ResampleMethod::multinomial: return "multinomial";
    case ResampleMethod::systematic: return "systematic";
    case ResampleMethod::residual: return "residual";
  }
  return "?";
}

NormalizedWeights normalize(std::span<const double> log_weights) {
  if (log_weights.empty()) throw DegenerateWeightsError("no weights to normalize");
  double max = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights) {
    if (std::isnan(lw) || lw == std::numeric_limits<double>::infinity())
      throw DegenerateWeightsError("weights contain NaN or +inf");
    max = std::max(max, lw);
  }
  if (max == -std::numeric_limits<double>::infinity())
    throw DegenerateWeightsError("all particles have zero weight");

  NormalizedWeights out;
  out.probs.resize(log_weights.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < log_weights.size(); ++k) {
    out.probs[k] = std::exp(log_weights[k] - max);
    sum += out.probs[k];
  }
  for (double& p : out.probs) p /= sum;
  out.log_sum = max + std::log(sum);
  out.log_mean = out.log_sum - std::log(static_cast<double>(log_weights.size()));
  return out;
}

double ess(std::span<const double> probs) {
  const auto k = static_cast<double>(probs.size());
  if (probs.empty()) return 0.0;
  if (std::all_of(probs.begin(), probs.end(), [&](double p) { return p == probs.front(); })) return k;
  double sq = 0.0;
  for (double p : probs) sq += p * p;
  return std::clamp(1.0 / sq, 1.0, k);
}

bool should_resample(std::span<const double> probs, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw ConfigError("resampling threshold must lie in [0, 1], got " + std::to_string(threshold));
  return ess(probs) / static_cast<double>(probs.size()) < threshold;
}

namespace {

// Walks sorted points in [0, total) through the cumulative weights.
std::vector<std::size_t> invert_sorted(std::span<const double> probs, std::span<const double> points) {
  std::vector<std::size_t> ids(points.size());
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i)
    if (probs[i] > 0.0) last_positive = i;
  std::size_t j = 0;
  double cum = probs.empty() ? 0.0 : probs[0];
  for (std::size_t i = 0; i < points.size(); ++i) {
    while (points[i] >= cum && j < last_positive) cum += probs[++j];
    ids[i] = j;
  }
  return ids;
}

std::vector<std::size_t> multinomial(std::span<const double> probs, std::size_t count, Rng& rng) {
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  std::vector<double> u(count);
  for (auto& v : u) v = rng.uniform() * total;
  std::sort(u.begin(), u.end());
  return invert_sorted(probs, u);
}

std::vector<std::size_t> systematic(std::span<const double> probs, std::size_t count, Rng& rng) {
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  const double offset = rng.uniform();
  std::vector<double> u(count);
  for (std::size_t i = 0; i < count; ++i) u[i] = (static_cast<double>(i) + offset) / static_cast<double>(count) * total;
  return invert_sorted(probs, u);
}

std::vector<std::size_t> residual(std::span<const double> probs, std::size_t count, Rng& rng) {
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  const auto n = static_cast<double>(count);
  std::vector<std::size_t> ids;
  ids.reserve(count);
  std::vector<double> rest(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double expected = n * probs[i] / total;
    const auto copies = static_cast<std::size_t>(std::floor(expected));
    ids.insert(ids.end(), copies, i);
    rest[i] = expected - static_cast<double>(copies);
  }
  if (ids.size() > count) ids.resize(count);
  const std::size_t remaining = count - ids.size();
  if (remaining > 0) {
    const bool usable = std::accumulate(rest.begin(), rest.end(), 0.0) > 0.0;
    auto extra = usable ? multinomial(rest, remaining, rng) : multinomial(probs, remaining, rng);
    ids.insert(ids.end(), extra.begin(), extra.end());
    std::sort(ids.begin(), ids.end());
  }
  return ids;
}

}  // namespace

std::vector<std::size_t> resample(std::span<const double> probs, std::size_t count, ResampleMethod method, Rng& rng) {
  if (probs.empty() || count == 0) return {};
  switch (method) {
    case ResampleMethod::multinomial: return multinomial(probs, count, rng);
    case ResampleMethod::systematic: return systematic(probs, count, rng);
    case ResampleMethod::residual: return residual(probs, count, rng);
  }
  return {};
}

}  // namespace smc
