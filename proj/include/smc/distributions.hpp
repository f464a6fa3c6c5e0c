#pragma once

#include <array>
#include <span>
#include <string_view>

#include "smc/rng.hpp"

namespace smc {

enum class DistKind { normal, beta, gamma, uniform };

// How the second argument of a normal is expressed. The other kinds ignore it.
enum class ScaleTag { precision, variance, sd };

// Parameters are always passed in canonical order:
//   normal  (mean, scale)   scale interpreted through the tag
//   beta    (shape1, shape2)
//   gamma   (shape, rate)
//   uniform (lower, upper)
struct DistSpec {
  DistKind kind = DistKind::normal;
  ScaleTag scale = ScaleTag::precision;

  bool operator==(const DistSpec&) const = default;
};

inline constexpr std::size_t kDistParamCount = 2;

std::string_view dist_name(DistKind kind);
std::array<std::string_view, kDistParamCount> param_names(const DistSpec& spec);

// Natural-log density. Values outside the support give -infinity; invalid
// parameters throw ParameterDomainError.
double log_density(const DistSpec& spec, double value, std::span<const double> params);

double sample(const DistSpec& spec, std::span<const double> params, Rng& rng);

// Converts a normal scale parameter into a precision.
double convert_scale(ScaleTag tag, double value);
// Inverse of convert_scale.
double precision_to_scale(ScaleTag tag, double precision);

enum class SupportKind { real_line, positive, interval };

struct Support {
  SupportKind kind = SupportKind::real_line;
  double lower = 0.0;
  double upper = 0.0;
};

Support support(const DistSpec& spec, std::span<const double> params);

}  // namespace smc
