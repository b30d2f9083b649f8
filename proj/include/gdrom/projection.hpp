#pragma once

#include "gdrom/operators.hpp"

#include <functional>

namespace gdrom {

/// Smooth velocity field given by samplers of its value and gradient
/// (gradient(c, d) = d u_c / d x_d).
struct AnalyticVelocity {
  std::function<Eigen::Vector2d(const Point&)> value;
  std::function<Eigen::Matrix2d(const Point&)> gradient;
};

/// Elliptic projection onto the discretely divergence-free space:
/// (grad s, grad phi) = (grad u, grad phi) for every phi in V_h, with the
/// boundary trace of s fixed to the nodal trace of u.  Solved as a Stokes
/// saddle-point problem with a Lagrange-multiplier pressure; the system is
/// factorized once at construction.
class StokesProjector {
 public:
  StokesProjector(const FemSpaces& spaces, const FomOperators& ops);

  VelocityField project(const VelocityField& target) const;
  VelocityField project(const AnalyticVelocity& target) const;

  /// Solution with prescribed boundary coefficients and right-hand side
  /// (grad u, grad phi_i).
  VelocityField solve(const VectorX& rhs, const VectorX& boundary_values) const;

 private:
  const FemSpaces* spaces_;
  const FomOperators* ops_;
  SaddlePointSolver solver_;
};

/// L2 projection onto the zero-mean P1 pressure space.
PressureField l2_project_pressure(const FemSpaces& spaces, const FomOperators& ops,
                                  const std::function<real(const Point&)>& p);
PressureField l2_project_pressure(const FomOperators& ops, const PressureField& p);

/// ||p - q_h||_0 for an analytic p and discrete q_h, by quadrature.
real pressure_l2_error(const FemSpaces& spaces, const std::function<real(const Point&)>& p,
                       const PressureField& q);

/// ||u - u_h||_0 for an analytic u and discrete u_h, by quadrature.
real velocity_l2_error(const FemSpaces& spaces, const std::function<Eigen::Vector2d(const Point&)>& u,
                       const VelocityField& uh);

}  // namespace gdrom
