#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "sgdlab/types.hpp"

namespace sgdlab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a master seed and a stream index.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t state = master + 0x9E3779B97F4A7C15ull * (index + 1);
  return splitmix64(state);
}

// Seeded random stream. All transforms (uniform, normal, index) are built on
// the raw mt19937_64 bit stream, so sequences are identical across standard
// library implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; the spare deviate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    spare_ = mag * std::sin(ang);
    has_spare_ = true;
    return mag * std::cos(ang);
  }

  /// Unbiased uniform draw from {0, ..., n-1}.
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t draw;
    do {
      draw = next_u64();
    } while (draw >= limit);
    return static_cast<std::size_t>(draw % n);
  }

  Vector gaussian(int dim) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = normal();
    return v;
  }

  /// Uniform direction on the unit sphere.
  Vector unit_vector(int dim) {
    while (true) {
      Vector v = gaussian(dim);
      const double norm = v.norm();
      if (norm > 1e-12) return v / norm;
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sgdlab
