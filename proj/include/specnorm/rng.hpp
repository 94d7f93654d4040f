#pragma once

// Deterministic random source. All bounded draws use mask rejection on the
// raw 64-bit stream, so sequences are reproducible across platforms and
// standard library implementations for a fixed seed.

#include <boost/multiprecision/cpp_int.hpp>

#include <bit>
#include <cstdint>
#include <random>

#include "dyadic.hpp"

namespace specnorm {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  // Uniform draw from [0, bound); bound >= 1.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    int bits = 64 - std::countl_zero(bound - 1);
    std::uint64_t mask = (bits == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
    for (;;) {
      std::uint64_t v = eng_() & mask;
      if (v < bound) return v;
    }
  }

  // Uniform draw from [0, bound) for big bounds; bound >= 1.
  BigInt below_big(const BigInt& bound) {
    if (bound <= 1) return 0;
    BigInt top = bound - 1;
    unsigned bits = boost::multiprecision::msb(top) + 1;
    unsigned words = (bits + 63) / 64;
    for (;;) {
      BigInt v = 0;
      for (unsigned i = 0; i < words; ++i) {
        v <<= 64;
        v |= BigInt(eng_());
      }
      v >>= (words * 64 - bits);
      if (v < bound) return v;
    }
  }

  bool coin() { return eng_() & 1u; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace specnorm
