#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "smc/rng.hpp"

namespace smc {

enum class ResampleMethod { multinomial, systematic, residual };

ResampleMethod parse_resample_method(std::string_view name);
std::string_view method_name(ResampleMethod method);

struct NormalizedWeights {
  std::vector<double> probs;
  double log_sum = 0.0;   // log sum_k w_k
  double log_mean = 0.0;  // log (1/K) sum_k w_k
};

// Log-sum-exp normalization. Throws DegenerateWeightsError when no entry is
// finite-positive (all -inf) or any entry is NaN or +inf.
NormalizedWeights normalize(std::span<const double> log_weights);

// 1 / sum(p^2), exactly K for equal weights, clamped to [1, K].
double ess(std::span<const double> probs);

// True iff ess/K < threshold. Throws ConfigError if threshold is outside [0, 1].
bool should_resample(std::span<const double> probs, double threshold);

// Draws `count` ancestor indices (0-based) from normalized probabilities. The
// result is sorted ascending.
std::vector<std::size_t> resample(std::span<const double> probs, std::size_t count, ResampleMethod method, Rng& rng);

}  // namespace smc
