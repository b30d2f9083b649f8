#include "gdrom/qoi.hpp"

#include "gdrom/errors.hpp"
#include "gdrom/projection.hpp"

#include <numeric>

namespace gdrom {

DragLiftTestFunctions stokes_test_functions(const FemSpaces& spaces, const FomOperators& ops) {
  if (!spaces.mesh().has_tag(BoundaryTag::cylinder))
    throw std::invalid_argument("stokes_test_functions: mesh has no cylinder boundary");
  const Index ns = spaces.n_scalar();
  VectorX trace_d = VectorX::Zero(spaces.n_velocity());
  VectorX trace_l = trace_d;
  for (Index s = 0; s < ns; ++s) {
    if (spaces.dof_tag(s) == BoundaryTag::cylinder) {
      trace_d[s] = 1.0;
      trace_l[ns + s] = 1.0;
    }
  }
  const StokesProjector projector(spaces, ops);
  const VectorX zero = VectorX::Zero(spaces.n_velocity());
  return {projector.solve(zero, trace_d), projector.solve(zero, trace_l)};
}

DragLiftEvaluator::DragLiftEvaluator(const FemSpaces& spaces, const FomOperators& ops, DragLiftTestFunctions tf,
                                     DragLiftScales scales)
    : spaces_(&spaces), tf_(std::move(tf)), scales_(scales) {
  mass_drag_ = ops.mass * tf_.drag;
  mass_lift_ = ops.mass * tf_.lift;
  stiff_drag_ = ops.stiffness * tf_.drag;
  stiff_lift_ = ops.stiffness * tf_.lift;
}

DragLift DragLiftEvaluator::operator()(const VelocityField& u, const VelocityField& u_prev, real dt, real nu) const {
  if (u_prev.size() != u.size() || !(dt > 0.0))
    throw std::invalid_argument("drag_lift: a previous state and a positive dt are required");
  const VectorX dudt = (u - u_prev) / dt;
  const real scale = -2.0 / (scales_.diameter * scales_.mean_velocity * scales_.mean_velocity);
  const real drag = dudt.dot(mass_drag_) + convection_apply(*spaces_, u, u, tf_.drag) + nu * u.dot(stiff_drag_);
  const real lift = dudt.dot(mass_lift_) + convection_apply(*spaces_, u, u, tf_.lift) + nu * u.dot(stiff_lift_);
  return {scale * drag, scale * lift};
}

real strouhal(std::span<const real> lift, real dt, real diameter, real mean_velocity) {
  if (lift.size() < 3) throw InsufficientData("strouhal: series too short");
  const real mean = std::accumulate(lift.begin(), lift.end(), 0.0) / static_cast<real>(lift.size());
  std::vector<real> crossings;
  for (std::size_t i = 1; i < lift.size(); ++i) {
    const real a = lift[i - 1] - mean, b = lift[i] - mean;
    if (a < 0.0 && b >= 0.0) crossings.push_back((static_cast<real>(i - 1) + a / (a - b)) * dt);
  }
  if (crossings.size() < 2) throw InsufficientData("strouhal: fewer than two upward zero crossings");
  const real period = (crossings.back() - crossings.front()) / static_cast<real>(crossings.size() - 1);
  return diameter / (period * mean_velocity);
}

}  // namespace gdrom
