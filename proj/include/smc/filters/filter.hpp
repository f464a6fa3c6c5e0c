#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "smc/graph.hpp"
#include "smc/particle_cloud.hpp"
#include "smc/resampling.hpp"
#include "smc/rng.hpp"
#include "smc/runtime.hpp"

namespace smc {

enum class Lookahead { mean, simulate };

Lookahead parse_lookahead(std::string_view name);
std::string_view lookahead_name(Lookahead lookahead);

struct FilterConfig {
  std::size_t particles = 1000;
  bool save_all = false;
  // Resample when ESS/K falls strictly below this value.
  double threshold = 0.8;
  ResampleMethod method = ResampleMethod::systematic;
  Lookahead lookahead = Lookahead::simulate;  // auxiliary filter
  double discount = 0.99;                     // Liu-West
  std::vector<std::string> parameters;        // Liu-West
  // Liu-West kernel on log/logit scales; false perturbs raw values.
  bool transform_parameters = true;
  std::size_t threads = 1;
  // Nodes kept at their values in the state even when they would otherwise
  // be drawn per particle as part of the initial state (PMMH targets).
  std::vector<NodeId> held;

  void validate() const;
};

struct ParameterSamples {
  std::vector<std::string> names;
  std::vector<NodeId> nodes;
  ParticleCloud weighted;
  ParticleCloud equally_weighted;
};

struct FilterResult {
  std::vector<NodeId> latent;
  std::size_t time_points = 0;

  // Particles with their normalized log-weights. Absent for the EnKF.
  std::optional<ParticleCloud> weighted;
  // Equally weighted sample of the filtering distribution. For the EnKF this
  // is the only output.
  ParticleCloud equally_weighted;

  std::vector<double> ess;
  std::vector<std::uint8_t> resampled;
  // ancestors[t][k]: row in slot t-1 of `weighted` that particle k of slot t
  // descends from. Filled when every time point is saved.
  std::vector<std::vector<std::uint32_t>> ancestors;

  // Absent for Liu-West and the EnKF.
  std::optional<double> log_likelihood;
  std::vector<double> log_likelihood_increments;

  std::optional<ParameterSamples> parameters;  // Liu-West
  std::vector<Eigen::MatrixXd> gains;          // EnKF

  std::size_t slot(std::size_t t) const { return equally_weighted.slots() == 1 ? 0 : t; }
};

// Index l drawn from the final weights, then its ancestral path through the
// stored clouds. Requires a weighted result with every time point saved.
std::vector<double> sample_trajectory(const FilterResult& result, Rng& rng);

}  // namespace smc
