#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace xnas::rng {

// SplitMix64 step; also used to mix words when deriving substreams.
std::uint64_t splitmix64(std::uint64_t& state);

// Counter-based substream derivation. Deriving with the same inputs always
// yields the same stream seed, independent of how many other streams exist.
std::uint64_t derive(std::uint64_t seed, std::uint64_t word);
std::uint64_t derive(std::uint64_t seed, std::string_view tag);
std::uint64_t derive(std::uint64_t seed, double value);

// xoshiro256++ with a deterministic gaussian source (polar Box-Muller).
// Used instead of <random> distributions so that output sequences are
// identical across standard-library implementations.
class Stream {
 public:
  explicit Stream(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform01();                       // [0, 1)
  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);          // inclusive bounds
  double gaussian();                        // standard normal
  double gaussian(double mean, double sigma);

 private:
  std::array<std::uint64_t, 4> state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace xnas::rng
