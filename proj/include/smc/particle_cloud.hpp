#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "smc/graph.hpp"
#include "smc/runtime.hpp"

namespace smc {

// K particles per time slot, each a block of `dim` values, plus log-weights.
// An equally-weighted cloud reports log(1/K) for every particle and rejects
// weight writes. Rows are independent, so disjoint rows may be written from
// different threads.
class ParticleCloud {
 public:
  ParticleCloud() = default;
  ParticleCloud(std::size_t particles, std::size_t slots, std::size_t dim = 1, bool equally_weighted = false);

  // Sets the particle count; contents are reset. Slot count and block size
  // are kept. Throws ConfigError for zero.
  void resize(std::size_t particles);

  std::size_t particles() const { return particles_; }
  std::size_t slots() const { return slots_; }
  std::size_t dim() const { return dim_; }
  bool equally_weighted() const { return equally_weighted_; }

  std::span<double> row(std::size_t slot, std::size_t k);
  std::span<const double> row(std::size_t slot, std::size_t k) const;
  double& value(std::size_t slot, std::size_t k, std::size_t j = 0) { return row(slot, k)[j]; }
  double value(std::size_t slot, std::size_t k, std::size_t j = 0) const { return row(slot, k)[j]; }

  // Column j of a slot across all particles.
  std::vector<double> column(std::size_t slot, std::size_t j = 0) const;

  double log_weight(std::size_t slot, std::size_t k) const;
  void set_log_weight(std::size_t slot, std::size_t k, double lw);
  std::vector<double> log_weights(std::size_t slot) const;
  // Normalized weights of a slot.
  std::vector<double> weights(std::size_t slot) const;

  bool operator==(const ParticleCloud&) const = default;

 private:
  void check(std::size_t slot, std::size_t k) const;

  std::size_t particles_ = 0;
  std::size_t slots_ = 0;
  std::size_t dim_ = 1;
  bool equally_weighted_ = false;
  std::vector<double> values_;
  std::vector<double> log_weights_;
};

// Exact value transfers between a cloud row and model nodes. `nodes` must have
// as many entries as the cloud's block size.
void copy(const ParticleCloud& from, std::size_t slot, std::size_t row, ModelState& to, std::span<const NodeId> nodes);
void copy(const ModelState& from, std::span<const NodeId> nodes, ParticleCloud& to, std::size_t slot, std::size_t row);
void copy(const ParticleCloud& from, std::size_t slot, std::size_t row, ParticleCloud& to, std::size_t slot_to,
          std::size_t row_to);

}  // namespace smc
