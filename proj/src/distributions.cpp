#include "smc/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/random/beta_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "smc/error.hpp"

namespace smc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

[[noreturn]] void domain_error(std::string_view dist, std::string_view what, double got) {
  throw ParameterDomainError(std::string(dist) + ": " + std::string(what) + " (got " +
                             std::to_string(got) + ")");
}

void require_positive(std::string_view dist, std::string_view param, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) domain_error(dist, std::string(param) + " must be positive and finite", v);
}

void require_finite(std::string_view dist, std::string_view param, double v) {
  if (!std::isfinite(v)) domain_error(dist, std::string(param) + " must be finite", v);
}

struct NormalParams {
  double mean;
  double precision;
};

NormalParams normal_params(const DistSpec& spec, std::span<const double> p) {
  require_finite("normal", "mean", p[0]);
  auto names = param_names(spec);
  require_positive("normal", names[1], p[1]);
  return {p[0], convert_scale(spec.scale, p[1])};
}

void check_two(const DistSpec& spec, std::span<const double> p) {
  if (p.size() != kDistParamCount)
    throw ParameterDomainError(std::string(dist_name(spec.kind)) + ": expected 2 parameters");
}

}  // namespace

std::string_view dist_name(DistKind kind) {
  switch (kind) {
    case DistKind::normal: return "dnorm";
    case DistKind::beta: return "dbeta";
    case DistKind::gamma: return "dgamma";
    case DistKind::uniform: return "dunif";
  }
  return "?";
}

std::array<std::string_view, kDistParamCount> param_names(const DistSpec& spec) {
  switch (spec.kind) {
    case DistKind::normal:
      switch (spec.scale) {
        case ScaleTag::precision: return {"mean", "tau"};
        case ScaleTag::variance: return {"mean", "var"};
        case ScaleTag::sd: return {"mean", "sd"};
      }
      break;
    case DistKind::beta: return {"shape1", "shape2"};
    case DistKind::gamma: return {"shape", "rate"};
    case DistKind::uniform: return {"min", "max"};
  }
  return {"?", "?"};
}

double convert_scale(ScaleTag tag, double value) {
  if (!(value > 0.0)) domain_error("scale conversion", "value must be positive", value);
  switch (tag) {
    case ScaleTag::precision: return value;
    case ScaleTag::variance: return 1.0 / value;
    case ScaleTag::sd: return 1.0 / (value * value);
  }
  return value;
}

double precision_to_scale(ScaleTag tag, double precision) {
  if (!(precision > 0.0)) domain_error("scale conversion", "precision must be positive", precision);
  switch (tag) {
    case ScaleTag::precision: return precision;
    case ScaleTag::variance: return 1.0 / precision;
    case ScaleTag::sd: return 1.0 / std::sqrt(precision);
  }
  return precision;
}

double log_density(const DistSpec& spec, double x, std::span<const double> p) {
  check_two(spec, p);
  if (std::isnan(x)) throw ParameterDomainError("density evaluated at an unset (NaN) value");
  switch (spec.kind) {
    case DistKind::normal: {
      auto [mean, prec] = normal_params(spec, p);
      const double z = x - mean;
      return 0.5 * std::log(prec / (2.0 * std::numbers::pi)) - 0.5 * prec * z * z;
    }
    case DistKind::beta: {
      require_positive("beta", "shape1", p[0]);
      require_positive("beta", "shape2", p[1]);
      if (!(x > 0.0 && x < 1.0)) return kNegInf;
      return std::lgamma(p[0] + p[1]) - std::lgamma(p[0]) - std::lgamma(p[1]) +
             (p[0] - 1.0) * std::log(x) + (p[1] - 1.0) * std::log1p(-x);
    }
    case DistKind::gamma: {
      require_positive("gamma", "shape", p[0]);
      require_positive("gamma", "rate", p[1]);
      if (!(x > 0.0) || std::isinf(x)) return kNegInf;
      return p[0] * std::log(p[1]) - std::lgamma(p[0]) + (p[0] - 1.0) * std::log(x) - p[1] * x;
    }
    case DistKind::uniform: {
      require_finite("uniform", "min", p[0]);
      require_finite("uniform", "max", p[1]);
      if (!(p[0] < p[1])) domain_error("uniform", "min must be below max", p[0]);
      if (x < p[0] || x > p[1]) return kNegInf;
      return -std::log(p[1] - p[0]);
    }
  }
  return kNegInf;
}

double sample(const DistSpec& spec, std::span<const double> p, Rng& rng) {
  check_two(spec, p);
  switch (spec.kind) {
    case DistKind::normal: {
      auto [mean, prec] = normal_params(spec, p);
      boost::random::normal_distribution<double> dist(mean, 1.0 / std::sqrt(prec));
      return dist(rng);
    }
    case DistKind::beta: {
      require_positive("beta", "shape1", p[0]);
      require_positive("beta", "shape2", p[1]);
      boost::random::beta_distribution<double> dist(p[0], p[1]);
      return dist(rng);
    }
    case DistKind::gamma: {
      require_positive("gamma", "shape", p[0]);
      require_positive("gamma", "rate", p[1]);
      boost::random::gamma_distribution<double> dist(p[0], 1.0 / p[1]);
      return dist(rng);
    }
    case DistKind::uniform: {
      require_finite("uniform", "min", p[0]);
      require_finite("uniform", "max", p[1]);
      if (!(p[0] < p[1])) domain_error("uniform", "min must be below max", p[0]);
      return p[0] + (p[1] - p[0]) * rng.uniform();
    }
  }
  return 0.0;
}

Support support(const DistSpec& spec, std::span<const double> p) {
  switch (spec.kind) {
    case DistKind::normal: return {SupportKind::real_line, 0.0, 0.0};
    case DistKind::gamma: return {SupportKind::positive, 0.0, 0.0};
    case DistKind::beta: return {SupportKind::interval, 0.0, 1.0};
    case DistKind::uniform: return {SupportKind::interval, p[0], p[1]};
  }
  return {};
}

}  // namespace smc
