#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using C = std::complex<double>;

// Annulus r < |z| < 1: e^{i theta} z^{-d} prod_k [m(z,p_k) prod_j pair_j], each image pair
// rescaled by conj(p)/p so the infinite product converges.
inline C wang_yin(double r, const std::vector<C>& zeros, int d, C z, int terms = 10) {
  C f = std::pow(z, -d);
  for (const C& p : zeros) {
    f *= (z - p) / (1.0 - std::conj(p) * z);
    for (int j = 1; j <= terms; ++j) {
      const double a = std::pow(r, 2 * j);
      const double b = 1.0 / a;
      f *= (z - p * a) * (z - p * b) / ((1.0 - std::conj(p) * a * z) * (1.0 - std::conj(p) * b * z)) *
           (std::conj(p) / p);
    }
  }
  return f;
}

inline C blaschke(const std::vector<C>& zeros, C z) {
  C f{1.0};
  for (const C& p : zeros) f *= ((z - p) / (1.0 - std::conj(p) * z)) / ((1.0 - p) / (1.0 - std::conj(p)));
  return f;
}

}  // namespace oracle
