#include "gdrom/projection.hpp"

#include <Eigen/SparseCholesky>

namespace gdrom {

StokesProjector::StokesProjector(const FemSpaces& spaces, const FomOperators& ops)
    : spaces_(&spaces), ops_(&ops), solver_(ops, spaces.boundary_mask(), true) {
  solver_.factorize(ops.stiffness);
}

VelocityField StokesProjector::solve(const VectorX& rhs, const VectorX& boundary_values) const {
  return solver_.solve(rhs, boundary_values).u;
}

VelocityField StokesProjector::project(const VelocityField& target) const {
  if (target.size() != spaces_->n_velocity()) throw std::invalid_argument("stokes projection: size mismatch");
  return solve(ops_->stiffness * target, target);
}

VelocityField StokesProjector::project(const AnalyticVelocity& target) const {
  const Index ns = spaces_->n_scalar();
  VectorX rhs = VectorX::Zero(spaces_->n_velocity());
  for (Index t = 0; t < spaces_->mesh().n_triangles(); ++t) {
    const auto dofs = spaces_->element_dofs(t);
    for (const auto& qp : spaces_->quadrature(t)) {
      const Eigen::Matrix2d g = target.gradient(qp.x);
      for (int i = 0; i < 6; ++i) {
        rhs[dofs[i]] += qp.weight * g.row(0).dot(qp.grad[i]);
        rhs[ns + dofs[i]] += qp.weight * g.row(1).dot(qp.grad[i]);
      }
    }
  }
  return solve(rhs, spaces_->interpolate(target.value));
}

PressureField l2_project_pressure(const FomOperators& ops, const PressureField& p) {
  // Constants lie in P1, so projecting onto the zero-mean subspace is the P1
  // projection (the identity here) followed by mean removal.
  const real area = ops.pressure_integrals.sum();
  return p.array() - ops.pressure_integrals.dot(p) / area;
}

PressureField l2_project_pressure(const FemSpaces& spaces, const FomOperators& ops,
                                  const std::function<real(const Point&)>& p) {
  VectorX load = VectorX::Zero(spaces.n_pressure());
  const auto& tri = spaces.mesh().triangles();
  for (Index t = 0; t < spaces.mesh().n_triangles(); ++t)
    for (const auto& qp : spaces.quadrature(t)) {
      const real pq = p(qp.x);
      for (int a = 0; a < 3; ++a) load[tri(a, t)] += qp.weight * qp.p1[a] * pq;
    }
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(ops.pressure_mass);
  return l2_project_pressure(ops, PressureField(ldlt.solve(load)));
}

real pressure_l2_error(const FemSpaces& spaces, const std::function<real(const Point&)>& p,
                       const PressureField& q) {
  real sum = 0.0;
  const auto& tri = spaces.mesh().triangles();
  for (Index t = 0; t < spaces.mesh().n_triangles(); ++t)
    for (const auto& qp : spaces.quadrature(t)) {
      real qh = 0.0;
      for (int a = 0; a < 3; ++a) qh += qp.p1[a] * q[tri(a, t)];
      sum += qp.weight * (p(qp.x) - qh) * (p(qp.x) - qh);
    }
  return std::sqrt(sum);
}

real velocity_l2_error(const FemSpaces& spaces, const std::function<Eigen::Vector2d(const Point&)>& u,
                       const VelocityField& uh) {
  real sum = 0.0;
  for (Index t = 0; t < spaces.mesh().n_triangles(); ++t)
    for (int q = 0; q < QuadratureRule::size; ++q) {
      const auto& qp = spaces.quadrature(t)[q];
      sum += qp.weight * (u(qp.x) - spaces.value_at(uh, t, q)).squaredNorm();
    }
  return std::sqrt(sum);
}

}  // namespace gdrom
