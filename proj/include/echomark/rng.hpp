// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOMARK_RNG_HPP
#define ECHOMARK_RNG_HPP

#include <cmath>
#include <cstdint>

namespace echomark {

// Stateless 64-bit mixer (murmur3 finalizer). Full avalanche, so
// mix64(key ^ counter-derived input) behaves as an independent draw per
// counter value.
inline uint64_t mix64(uint64_t z) {
  z ^= z >> 33;
  z *= 0xff51afd7ed558ccdULL;
  z ^= z >> 33;
  z *= 0xc4ceb9fe1a85ec53ULL;
  z ^= z >> 33;
  return z;
}

// Counter-based generator: every draw is a pure function of
// (key, stream, index), so any sample of any stream can be regenerated
// independently and outputs are identical across runs and platforms.
class CounterRng {
 public:
  CounterRng(uint64_t key, uint64_t stream)
      : base_(mix64(key ^ mix64(stream + 0x9e3779b97f4a7c15ULL))) {}

  uint64_t bits_at(uint64_t i) const {
    return mix64(base_ + i * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double u01_at(uint64_t i) const {
    return static_cast<double>(bits_at(i) >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller on the (2i, 2i+1) uniform pair.
  double gauss_at(uint64_t i) const {
    double u1 = u01_at(2 * i);
    double u2 = u01_at(2 * i + 1);
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // +1/-1 with equal probability.
  double sign_at(uint64_t i) const {
    return (bits_at(i) & 1u) ? 1.0 : -1.0;
  }

  // Sequential interface for callers that just want a stream.
  uint64_t next_bits() { return bits_at(counter_++); }
  double next_u01() { return u01_at(counter_++); }
  double next_gauss() { return gauss_at(counter_++); }

 private:
  uint64_t base_;
  uint64_t counter_ = 0;
};

// Derives a sub-seed for an independent purpose (e.g. per manifest row).
inline uint64_t derive_seed(uint64_t seed, uint64_t purpose, uint64_t index) {
  return mix64(seed ^ mix64(purpose) ^ (index * 0xbf58476d1ce4e5b9ULL));
}

}  // namespace echomark

#endif  // ECHOMARK_RNG_HPP
