#pragma once

#include <cmath>
#include <cstdint>

namespace ssep {

// splitmix64 finalizer (Steele, Lea, Flood).
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Replica seed: mix64(master + (replica_id + 1) * golden gamma).
inline std::uint64_t replica_seed(std::uint64_t master, std::uint64_t replica_id) {
  return mix64(master + (replica_id + 1) * 0x9E3779B97F4A7C15ULL);
}

// Sub-stream of a seed, used to separate initial-condition and dynamics draws.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0xD1B54A32D192ED03ULL));
}

// xoshiro256** 1.0, seeded from four splitmix64 outputs.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed = 0) { reseed(seed); }

  void reseed(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type(0); }

  result_type operator()() {
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

  // uniform in [0,1) with 53 bits
  double uniform() { return double((*this)() >> 11) * 0x1.0p-53; }

  // uniform in (0,1]
  double uniform_pos() { return (double((*this)() >> 11) + 1.0) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

// Lemire bounded draw from a 32-bit word, range < 2^32.
inline std::uint32_t bounded32(std::uint32_t word, std::uint32_t range) {
  return std::uint32_t((std::uint64_t(word) * range) >> 32);
}


}  // namespace ssep
