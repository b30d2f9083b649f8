#pragma once

#include "gdrom/fem_spaces.hpp"

#include <Eigen/SparseLU>

#include <functional>
#include <string>

namespace gdrom {

/// Assembled bilinear forms of the Taylor-Hood discretization.  Velocity
/// operators act on component-blocked coefficients; none has boundary
/// conditions applied.
struct FomOperators {
  SparseMatrix mass;           // (u, v)
  SparseMatrix stiffness;      // (grad u, grad v)
  SparseMatrix divergence;     // (div u, q), rows = pressure dofs
  SparseMatrix grad_div;       // (div u, div v)
  SparseMatrix pressure_mass;  // (p, q)
  VectorX pressure_integrals;  // (1, q)
  std::string quadrature = "dunavant-7 (degree 5)";
};

FomOperators assemble_operators(const FemSpaces& spaces);

/// Matrix of v -> b_h(w, v, .) for fixed w: entry (i, j) = b_h(w, phi_j, phi_i).
SparseMatrix convection_matrix(const FemSpaces& spaces, const VelocityField& w);

/// b_h(w, v, phi) = ((w . grad) v, phi) + 1/2 ((div w) v, phi), by direct
/// quadrature.
real convection_apply(const FemSpaces& spaces, const VelocityField& w, const VelocityField& v,
                      const VelocityField& phi);

/// Load vector (f, phi_i) of a velocity-valued function.
VectorX load_vector(const FemSpaces& spaces, const std::function<Eigen::Vector2d(const Point&)>& f);

/// Gram matrices of a set of velocity fields (columns), by quadrature:
/// (grad a_i, grad a_j) and (div a_i, div a_j).
MatrixX gradient_gram(const FemSpaces& spaces, const MatrixX& fields);
MatrixX divergence_gram(const FemSpaces& spaces, const MatrixX& fields);

inline real l2_norm(const FomOperators& ops, const VectorX& u) { return std::sqrt(u.dot(ops.mass * u)); }
inline real h1_seminorm(const FomOperators& ops, const VectorX& u) {
  return std::sqrt(u.dot(ops.stiffness * u));
}
inline real h1_norm(const FomOperators& ops, const VectorX& u) {
  return std::sqrt(u.dot(ops.mass * u) + u.dot(ops.stiffness * u));
}
inline real div_norm(const FomOperators& ops, const VectorX& u) { return std::sqrt(u.dot(ops.grad_div * u)); }

/// Block system  [K  -B^T  0; -B  0  m; 0  m^T  0]  with Dirichlet rows of K
/// replaced by identity.  The mean-pressure multiplier row (m = pressure
/// integrals) is present only when requested; it is needed when every
/// boundary dof is constrained.
class SaddlePointSolver {
 public:
  SaddlePointSolver(const FomOperators& ops, std::vector<bool> constrained, bool mean_constraint);

  /// Factorizes for a new velocity block; reuses the symbolic analysis when
  /// the sparsity pattern is unchanged.
  void factorize(const SparseMatrix& velocity_block, long step = -1);

  struct Solution {
    VelocityField u;
    PressureField p;
  };

  /// rhs is the velocity load; values supplies the constrained coefficients.
  Solution solve(const VectorX& rhs, const VectorX& values) const;

  Index n_velocity() const { return n_u_; }
  const std::vector<bool>& constrained() const { return constrained_; }

 private:
  const FomOperators* ops_;
  std::vector<bool> constrained_;
  bool mean_constraint_;
  Index n_u_, n_p_;
  SparseMatrix system_;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  bool analyzed_ = false;
  std::vector<int> pattern_;
};

}  // namespace gdrom
