#pragma once

// Divergence-free manufactured flow on the unit square:
//   u(x, t) = g(t) curl(sin^2(pi x) sin^2(pi y)),  p(x, t) = g(t) cos(pi x) cos(pi y).
// Closed forms generated symbolically; used only as test oracles.

#include "gdrom/fom.hpp"
#include "gdrom/projection.hpp"

#include <cmath>
#include <numbers>

namespace gdrom::testing {

inline constexpr double pi = std::numbers::pi;

inline Eigen::Vector2d curl_field(const Point& p) {
  const double x = p.x(), y = p.y();
  return {2 * pi * std::pow(std::sin(pi * x), 2) * std::sin(pi * y) * std::cos(pi * y),
          -2 * pi * std::sin(pi * x) * std::pow(std::sin(pi * y), 2) * std::cos(pi * x)};
}

inline Eigen::Matrix2d curl_field_gradient(const Point& p) {
  const double x = p.x(), y = p.y();
  Eigen::Matrix2d g;
  g(0, 0) = pi * pi * std::sin(2 * pi * x) * std::sin(2 * pi * y);
  g(0, 1) = 2 * pi * pi * std::pow(std::sin(pi * x), 2) * std::cos(2 * pi * y);
  g(1, 0) = -2 * pi * pi * std::pow(std::sin(pi * y), 2) * std::cos(2 * pi * x);
  g(1, 1) = -g(0, 0);
  return g;
}

inline Eigen::Vector2d curl_field_laplacian(const Point& p) {
  const double x = p.x(), y = p.y();
  return {4 * std::pow(pi, 3) * (2 * std::cos(2 * pi * x) - 1) * std::sin(pi * y) * std::cos(pi * y),
          4 * std::pow(pi, 3) * (1 - 2 * std::cos(2 * pi * y)) * std::sin(pi * x) * std::cos(pi * x)};
}

inline Eigen::Vector2d curl_field_advection(const Point& p) {
  const double x = p.x(), y = p.y();
  return {4 * std::pow(pi, 3) * std::pow(std::sin(pi * x), 3) * std::pow(std::sin(pi * y), 2) * std::cos(pi * x),
          4 * std::pow(pi, 3) * std::pow(std::sin(pi * x), 2) * std::pow(std::sin(pi * y), 3) * std::cos(pi * y)};
}

inline double pressure_field(const Point& p) { return std::cos(pi * p.x()) * std::cos(pi * p.y()); }

inline Eigen::Vector2d pressure_gradient(const Point& p) {
  return {-pi * std::sin(pi * p.x()) * std::cos(pi * p.y()), -pi * std::sin(pi * p.y()) * std::cos(pi * p.x())};
}

inline AnalyticVelocity curl_velocity(double scale = 1.0) {
  return {[scale](const Point& x) -> Eigen::Vector2d { return scale * curl_field(x); },
          [scale](const Point& x) -> Eigen::Matrix2d { return scale * curl_field_gradient(x); }};
}

/// Forcing for u = cos(t) curl(psi) with pressure cos(t) p, viscosity nu.
inline Forcing manufactured_forcing(double nu) {
  Forcing f;
  f.terms.push_back({[](double t) { return -std::sin(t); }, curl_field});
  f.terms.push_back({[](double t) { return std::cos(t); },
                     [nu](const Point& x) -> Eigen::Vector2d {
                       return -nu * curl_field_laplacian(x) + pressure_gradient(x);
                     }});
  f.terms.push_back({[](double t) { return std::cos(t) * std::cos(t); }, curl_field_advection});
  return f;
}

}  // namespace gdrom::testing
