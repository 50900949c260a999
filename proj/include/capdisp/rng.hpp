#pragma once

#include <array>
#include <cstdint>

namespace capdisp {

// Splittable counter-seeded generator (xoshiro256++ core, splitmix64 seeding).
// The contract is (seed, stream) -> fixed sample sequence, so parallel workers
// can each derive their own stream and results stay independent of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Child generator for substream i; deterministic function of (seed, stream, i).
  Rng derive(std::uint64_t i) const;

  std::uint64_t next_u64();
  double uniform();                    // [0, 1)
  double uniform(double a, double b);  // [a, b)
  double gaussian();                   // standard normal, Box-Muller

 private:
  std::array<std::uint64_t, 4> s_{};
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  double cached_gauss_ = 0.0;
  bool has_cached_gauss_ = false;
};

}  // namespace capdisp
