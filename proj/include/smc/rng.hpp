#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace smc {

// xoshiro256** seeded through splitmix64.
//
// Every generator carries a 64-bit key describing where it came from. derive()
// builds a child stream from the key alone, never from the current position,
// so per-(time, particle) streams are identical no matter how many draws the
// parent has made or which worker thread asks for them.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on the open interval (0, 1).
  double uniform();

  Rng derive(std::initializer_list<std::uint64_t> path) const;

  std::uint64_t key() const { return key_; }

  bool operator==(const Rng& other) const = default;

 private:
  struct FromKey {};
  Rng(FromKey, std::uint64_t key);

  std::uint64_t key_;
  std::uint64_t s_[4];
};

// Stream tags so that different stages of an algorithm never share draws.
namespace stream {
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kPropagate = 2;
inline constexpr std::uint64_t kResample = 3;
inline constexpr std::uint64_t kLookahead = 4;
inline constexpr std::uint64_t kOutputResample = 5;
inline constexpr std::uint64_t kKernel = 6;
inline constexpr std::uint64_t kObsNoise = 7;
inline constexpr std::uint64_t kProposal = 8;
inline constexpr std::uint64_t kAccept = 9;
inline constexpr std::uint64_t kFilterRun = 10;
inline constexpr std::uint64_t kTrajectory = 11;
}  // namespace stream

}  // namespace smc
