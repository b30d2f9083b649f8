#pragma once

#include "gdrom/pod.hpp"

#include <memory>
#include <string>

namespace gdrom {

enum class InterpKind { nodal, piecewise_constant, identity };

std::string to_string(InterpKind kind);
InterpKind parse_interp_kind(const std::string& name);

/// Coarse observation operator I_H.  A fine velocity field u maps to coarse
/// coefficients c = E u (P1 nodal values, or P0 cell averages); inner
/// products of interpolants use the coarse Gram matrix Gc, so
/// (I_H u, I_H v) = (E u)^T Gc (E v).  Velocity coefficients on the coarse
/// side are component-blocked like the fine ones.
class CoarseInterp {
 public:
  InterpKind kind() const { return kind_; }
  /// Coarse resolution H (max edge length of the coarse mesh; h for identity).
  real resolution() const { return resolution_; }
  /// Null for the identity kind.
  const Mesh* coarse_mesh() const { return coarse_.get(); }
  Index n_coarse() const { return sampling_.rows(); }

  const SparseMatrix& sampling() const { return sampling_; }
  const SparseMatrix& gram() const { return gram_; }
  /// (coarse basis function, fine basis function) mixed Gram, by fine quadrature.
  const SparseMatrix& cross() const { return cross_; }

  VectorX apply(const VelocityField& u) const { return sampling_ * u; }
  /// Interpolant of a pointwise field (nodal values or quadrature averages).
  VectorX apply(const std::function<Eigen::Vector2d(const Point&)>& f) const;
  /// Value of the coarse interpolant with coefficients c at x.
  Eigen::Vector2d evaluate(const VectorX& c, const Point& x) const;

  real norm(const VectorX& c) const { return std::sqrt(c.dot(gram_ * c)); }
  /// ||u - I_H u||_0.
  real distance(const VelocityField& u, const SparseMatrix& mass) const;

 private:
  friend CoarseInterp build_coarse_interp(const FemSpaces& fine, Mesh coarse, InterpKind kind);
  friend CoarseInterp identity_interp(const FemSpaces& fine, const FomOperators& ops);

  InterpKind kind_ = InterpKind::identity;
  real resolution_ = 0.0;
  std::shared_ptr<const Mesh> coarse_;
  std::shared_ptr<const PointLocator> locator_;  // coarse mesh, or fine mesh for identity
  const FemSpaces* fine_ = nullptr;
  SparseMatrix sampling_;
  SparseMatrix gram_;
  SparseMatrix cross_;
  // Piecewise-constant kind: coarse cell of every fine quadrature point
  // (-1 if unassigned) and the quadrature weight collected by each cell.
  std::vector<std::array<Index, QuadratureRule::size>> cell_of_point_;
  std::vector<real> cell_weight_;
};

/// Nodal kind: coarse vertices must lie in the fine mesh (GeometryError
/// otherwise).  Piecewise-constant kind: every fine quadrature point must lie
/// in the coarse mesh.
CoarseInterp build_coarse_interp(const FemSpaces& fine, Mesh coarse, InterpKind kind);

/// I_H = identity on the fine space (H = h); Gc is the fine mass matrix.
CoarseInterp identity_interp(const FemSpaces& fine, const FomOperators& ops);

struct InterpConstants {
  real c0 = 0.0;  // max ||I_H u|| / ||u||
  real ci = 0.0;  // max ||u - I_H u|| / (H ||grad u||)
};

/// Probes with zero norm are skipped; probes with zero gradient only enter c0.
InterpConstants estimate_constants(const CoarseInterp& interp, const FomOperators& ops,
                                   const std::vector<VelocityField>& probes);

/// Smooth and oscillatory probe fields: constants, linears and products of
/// sines up to wavenumber 4 per direction.
std::vector<VelocityField> standard_probes(const FemSpaces& spaces);

/// Reduced nudging terms.  G_ij = (I_H psi_i, I_H psi_j); the data vector at
/// time t is d_k = (I_H u(t), I_H psi_k) for the observation nearest to t,
/// with the observation window repeated periodically.
struct NudgingAlgebra {
  MatrixX gram;
  /// Row k maps a fine field u to (I_H u, I_H psi_k).
  MatrixX weights;
  /// Columns d(t_j) for the observation times.
  MatrixX data;
  real t_first = 0.0;
  real dt = 0.0;

  Index count() const { return data.cols(); }
  real period() const { return dt * static_cast<real>(count()); }
  /// Index of the observation used at time t.
  Index observation_index(real t) const;
  VectorX data_at(real t) const { return data.col(observation_index(t)); }
};

/// Throws invalid_argument for an empty observation set when beta > 0.
NudgingAlgebra build_nudging_algebra(const PodBasis& basis, const CoarseInterp& interp,
                                     const SnapshotSet& observations, real beta = 1.0);

}  // namespace gdrom
