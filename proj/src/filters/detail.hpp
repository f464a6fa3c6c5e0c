#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "smc/error.hpp"
#include "smc/filters/filter.hpp"

namespace smc::detail {

inline NormalizedWeights normalize_at(std::span<const double> log_weights, std::size_t t, const char* what) {
  try {
    return normalize(log_weights);
  } catch (const DegenerateWeightsError& e) {
    throw DegenerateWeightsError(std::string(what) + " weights degenerate at t=" + std::to_string(t + 1) + ": " +
                                 e.what());
  }
}

FilterResult make_result(std::size_t particles, std::size_t time_points, bool save_all, bool weighted);

void store_weighted(FilterResult& r, std::size_t t, std::span<const double> values,
                    std::span<const double> log_weights, double log_sum);

// Fills the equally weighted slot from ancestor indices into `values`.
void store_equal(FilterResult& r, std::size_t t, std::span<const double> values, std::span<const std::size_t> ids);

void store_ancestors(FilterResult& r, std::size_t t, std::span<const std::uint32_t> parents);

}  // namespace smc::detail
