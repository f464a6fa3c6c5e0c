#include <cmath>
#include <string>

#include "detail.hpp"
#include "smc/error.hpp"
#include "smc/filters.hpp"

namespace smc {

Lookahead parse_lookahead(std::string_view name) {
  if (name == "mean") return Lookahead::mean;
  if (name == "simulate") return Lookahead::simulate;
  throw ConfigError("unknown lookahead '" + std::string(name) + "' (expected mean or simulate)");
}

std::string_view lookahead_name(Lookahead lookahead) { return lookahead == Lookahead::mean ? "mean" : "simulate"; }

void FilterConfig::validate() const {
  if (particles < 1) throw ConfigError("particle count must be at least 1");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("threshold must lie in [0, 1]");
  if (!(discount > 0.0 && discount <= 1.0)) throw ConfigError("discount must lie in (0, 1]");
  if (threads < 1) throw ConfigError("thread count must be at least 1");
}

LiuWestKernel liu_west_kernel(double d) {
  if (!(d > 0.0 && d <= 1.0)) throw ConfigError("discount must lie in (0, 1]");
  const double a = (3.0 * d - 1.0) / (2.0 * d);
  return {a, 1.0 - a * a};
}

std::vector<double> sample_trajectory(const FilterResult& r, Rng& rng) {
  if (!r.weighted) throw ConfigError("trajectory sampling needs a weighted filter result");
  const std::size_t T = r.time_points;
  if (r.weighted->slots() != T || r.ancestors.size() != T)
    throw ConfigError("trajectory sampling needs every time point saved");
  const auto w = r.weighted->weights(T - 1);
  std::size_t l = resample(w, 1, ResampleMethod::multinomial, rng).front();
  std::vector<double> path(T);
  for (std::size_t t = T; t-- > 0;) {
    path[t] = r.weighted->value(t, l);
    if (t > 0) l = r.ancestors[t][l];
  }
  return path;
}

namespace detail {

FilterResult make_result(std::size_t particles, std::size_t time_points, bool save_all, bool weighted) {
  FilterResult r;
  r.time_points = time_points;
  const std::size_t slots = save_all ? time_points : 1;
  if (weighted) r.weighted = ParticleCloud(particles, slots, 1, false);
  r.equally_weighted = ParticleCloud(particles, slots, 1, true);
  r.ess.assign(time_points, static_cast<double>(particles));
  r.resampled.assign(time_points, 0);
  if (save_all) r.ancestors.resize(time_points);
  return r;
}

void store_weighted(FilterResult& r, std::size_t t, std::span<const double> values,
                    std::span<const double> log_weights, double log_sum) {
  const std::size_t slot = r.slot(t);
  for (std::size_t k = 0; k < values.size(); ++k) {
    r.weighted->value(slot, k) = values[k];
    r.weighted->set_log_weight(slot, k, log_weights[k] - log_sum);
  }
}

void store_equal(FilterResult& r, std::size_t t, std::span<const double> values, std::span<const std::size_t> ids) {
  const std::size_t slot = r.slot(t);
  for (std::size_t k = 0; k < ids.size(); ++k) r.equally_weighted.value(slot, k) = values[ids[k]];
}

void store_ancestors(FilterResult& r, std::size_t t, std::span<const std::uint32_t> parents) {
  if (r.ancestors.empty()) return;
  r.ancestors[t].assign(parents.begin(), parents.end());
}

}  // namespace detail
}  // namespace smc
