#pragma once

// Deterministic random primitives used by pruning and the workload generator.
//
// Everything is built on std::mt19937_64, whose output sequence is fixed by
// the standard, plus hand-rolled bounded/real/normal draws. The stock
// distributions (std::uniform_int_distribution etc.) are implementation
// defined, so two builds of this code could disagree; these are not.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "placstore/error.hpp"

namespace placstore {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound) by modulo rejection: draws below
  // 2^64 mod bound are rejected, leaving a multiple of bound outcomes.
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound == 0) throw InvalidArgument("uniform_below: bound must be positive");
    const std::uint64_t threshold = (-bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= threshold) return x % bound;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller. Two uniforms per value; the sine branch
  // is discarded, which keeps each call independent of call parity.
  double normal() {
    double u1 = uniform_double();
    while (u1 == 0.0) u1 = uniform_double();
    const double u2 = uniform_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  // First `count` elements of a Fisher-Yates shuffle of [0, n): a uniform
  // sample without replacement, returned in draw order.
  std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t count) {
    if (count > n) throw InvalidArgument("sample_without_replacement: count > n");
    std::vector<std::uint32_t> ids(n);
    for (std::uint32_t i = 0; i < n; ++i) ids[i] = i;
    for (std::uint32_t i = 0; i < count; ++i) {
      const auto j = i + static_cast<std::uint32_t>(uniform_below(n - i));
      std::swap(ids[i], ids[j]);
    }
    ids.resize(count);
    return ids;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace placstore
