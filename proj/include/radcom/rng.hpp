// SPDX-License-Identifier: Apache-2.0
//
// Seeded random draws for the Monte-Carlo harness. std::mt19937_64 output
// is fully specified, and the transforms below avoid the
// implementation-defined std::*_distribution classes, so identical seeds
// give bit-identical channels and symbol blocks on every platform.

#pragma once

#include <cmath>
#include <random>

#include "radcom/types.hpp"

namespace radcom {

class Rng {
 public:
  explicit Rng(RngSeed seed) : gen_(seed.value) {}

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Standard complex Gaussian CN(0, 1): real and imaginary parts each
  /// N(0, 1/2), via Box-Muller.
  Complex gaussian() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    const double mag = std::sqrt(-std::log(u1));  // sqrt(-2 ln u) / sqrt(2)
    return {mag * std::cos(2.0 * M_PI * u2), mag * std::sin(2.0 * M_PI * u2)};
  }

  /// Index 0..3, uniform (top two bits of the generator output).
  int qpsk_index() { return static_cast<int>(gen_() >> 62); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace radcom
