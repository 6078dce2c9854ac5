#pragma once

// Seeded generators shared by the property tests.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "qdiff/core.hpp"

namespace qd::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Complex box(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi)}; }

  // modulus uniform in [rmin, rmax], argument uniform
  Complex annulus(double rmin, double rmax) { return std::polar(uniform(rmin, rmax), uniform(-kPi, kPi)); }

  // (a, b) with both moduli in [rmin, rmax] and |a - b| >= sep
  std::pair<Complex, Complex> separated_pair(double rmin, double rmax, double sep) {
    for (;;) {
      const Complex a = annulus(rmin, rmax), b = annulus(rmin, rmax);
      if (std::abs(a - b) >= sep) return {a, b};
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace qd::testing
