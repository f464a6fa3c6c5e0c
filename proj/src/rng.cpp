#include "smc/rng.hpp"

namespace smc {
namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t key, std::uint64_t value) {
  std::uint64_t x = key ^ (value + 0x632be59bd9b4e019ULL + (key << 6) + (key >> 2));
  return splitmix64(x);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) : Rng(FromKey{}, mix(0x5eed5eed5eed5eedULL, seed)) {}

Rng::Rng(FromKey, std::uint64_t key) : key_(key) {
  std::uint64_t x = key;
  for (auto& s : s_) s = splitmix64(x);
}

Rng::result_type Rng::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  // 53 random bits, shifted by half an ulp so 0 is never returned.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

Rng Rng::derive(std::initializer_list<std::uint64_t> path) const {
  std::uint64_t k = key_;
  for (auto p : path) k = mix(k, p);
  return Rng(FromKey{}, k);
}

}  // namespace smc
