#pragma once

#include "gdrom/fem_spaces.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace gdrom::testing {

inline VectorX random_vector(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> d;
  VectorX v(n);
  for (Index i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

/// Random field in X_h (zero trace on every boundary edge).
inline VelocityField random_interior_field(std::mt19937_64& rng, const FemSpaces& spaces) {
  return spaces.restrict_to_interior(random_vector(rng, spaces.n_velocity()));
}

/// Least-squares slope of log(err) against log(h).
inline double observed_order(const std::vector<double>& h, const std::vector<double>& err) {
  const std::size_t n = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(h[i]), ly = std::log(err[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace gdrom::testing
