#include "smc/particle_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "smc/error.hpp"
#include "smc/resampling.hpp"

namespace smc {

ParticleCloud::ParticleCloud(std::size_t particles, std::size_t slots, std::size_t dim, bool equally_weighted)
    : slots_(slots), dim_(dim), equally_weighted_(equally_weighted) {
  if (slots == 0) throw ConfigError("particle cloud needs at least one slot");
  if (dim == 0) throw ConfigError("particle cloud needs a positive block size");
  resize(particles);
}

void ParticleCloud::resize(std::size_t particles) {
  if (particles < 1) throw ConfigError("particle count must be at least 1");
  particles_ = particles;
  values_.assign(slots_ * particles_ * dim_, std::numeric_limits<double>::quiet_NaN());
  log_weights_.assign(slots_ * particles_, -std::log(static_cast<double>(particles_)));
}

void ParticleCloud::check(std::size_t slot, std::size_t k) const {
  if (slot >= slots_) throw std::out_of_range("slot " + std::to_string(slot) + " out of range (" + std::to_string(slots_) + " slots)");
  if (k >= particles_)
    throw std::out_of_range("row " + std::to_string(k) + " out of range (" + std::to_string(particles_) + " particles)");
}

std::span<double> ParticleCloud::row(std::size_t slot, std::size_t k) {
  check(slot, k);
  return {values_.data() + (slot * particles_ + k) * dim_, dim_};
}

std::span<const double> ParticleCloud::row(std::size_t slot, std::size_t k) const {
  check(slot, k);
  return {values_.data() + (slot * particles_ + k) * dim_, dim_};
}

std::vector<double> ParticleCloud::column(std::size_t slot, std::size_t j) const {
  std::vector<double> out(particles_);
  for (std::size_t k = 0; k < particles_; ++k) out[k] = row(slot, k)[j];
  return out;
}

double ParticleCloud::log_weight(std::size_t slot, std::size_t k) const {
  check(slot, k);
  return log_weights_[slot * particles_ + k];
}

void ParticleCloud::set_log_weight(std::size_t slot, std::size_t k, double lw) {
  check(slot, k);
  if (equally_weighted_) throw std::logic_error("cannot set weights on an equally weighted cloud");
  log_weights_[slot * particles_ + k] = lw;
}

std::vector<double> ParticleCloud::log_weights(std::size_t slot) const {
  check(slot, 0);
  auto first = log_weights_.begin() + static_cast<std::ptrdiff_t>(slot * particles_);
  return {first, first + static_cast<std::ptrdiff_t>(particles_)};
}

std::vector<double> ParticleCloud::weights(std::size_t slot) const {
  return normalize(log_weights(slot)).probs;
}

void copy(const ParticleCloud& from, std::size_t slot, std::size_t row, ModelState& to, std::span<const NodeId> nodes) {
  auto r = from.row(slot, row);
  if (nodes.size() != r.size()) throw std::invalid_argument("node list does not match the cloud block size");
  for (std::size_t j = 0; j < nodes.size(); ++j) to[nodes[j]] = r[j];
}

void copy(const ModelState& from, std::span<const NodeId> nodes, ParticleCloud& to, std::size_t slot, std::size_t row) {
  auto r = to.row(slot, row);
  if (nodes.size() != r.size()) throw std::invalid_argument("node list does not match the cloud block size");
  for (std::size_t j = 0; j < nodes.size(); ++j) r[j] = from[nodes[j]];
}

void copy(const ParticleCloud& from, std::size_t slot, std::size_t row, ParticleCloud& to, std::size_t slot_to,
          std::size_t row_to) {
  auto src = from.row(slot, row);
  auto dst = to.row(slot_to, row_to);
  if (src.size() != dst.size()) throw std::invalid_argument("cloud block sizes differ");
  std::copy(src.begin(), src.end(), dst.begin());
}

}  // namespace smc
