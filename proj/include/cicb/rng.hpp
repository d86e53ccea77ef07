#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace cicb {

using rng_t = std::mt19937_64;

// Uniform double in [0, 1). Uses the top 53 bits of the engine output so the
// stream is identical across standard libraries.
inline double runif(rng_t& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double runif(rng_t& rng, double lo, double hi) {
  return lo + (hi - lo) * runif(rng);
}

// Standard normal via Box-Muller; avoids std::normal_distribution so that
// seeded runs reproduce bit-for-bit on any conforming implementation.
inline double rnormal(rng_t& rng) {
  double u1 = 0.0;
  do {
    u1 = runif(rng);
  } while (u1 <= 0.0);
  const double u2 = runif(rng);
  const double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

// Circularly symmetric complex normal with E|z|^2 = var.
inline std::complex<double> cnormal(rng_t& rng, double var = 1.0) {
  const double s = std::sqrt(var * 0.5);
  const double re = s * rnormal(rng);
  const double im = s * rnormal(rng);
  return {re, im};
}

// Complex gain with log-uniform magnitude between the given dB endpoints and
// uniform phase.
inline std::complex<double> random_gain(rng_t& rng, double min_db, double max_db) {
  const double db = runif(rng, min_db, max_db);
  const double mag = std::pow(10.0, db / 20.0);
  const double two_pi = 6.283185307179586476925286766559;
  const double phase = runif(rng) * two_pi;
  return std::polar(mag, phase);
}

}  // namespace cicb
