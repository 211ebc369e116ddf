#pragma once

#include <cstdint>

namespace billiards {

// SplitMix64 finalizer.  Used both to expand a user seed into generator state
// and to derive independent per-stream seeds.
inline std::uint64_t splitmix64_mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// xoshiro256++ (Blackman/Vigna).  State is seeded from SplitMix64 so that any
// 64-bit user seed, including 0, yields a valid nonzero state.
//
// Stream contract: uniform01() emits exactly one double per call, computed as
// (next() >> 11) * 2^-53, uniform on [0, 1).  Simulations consume one uniform
// per documented draw in a fixed order, so a (seed, draw index) pair pins the
// value exactly across platforms.
class Xoshiro256PlusPlus {
 public:
  explicit Xoshiro256PlusPlus(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

// Seed for logical stream `stream` under master seed `seed`.  Streams are
// decorrelated by mixing the index through SplitMix64 before XOR; stream 0 is
// not the master seed itself, so ensemble member 0 never shadows a
// single-trajectory run with the same seed.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return seed ^ splitmix64_mix(stream + 1);
}

}  // namespace billiards
