#pragma once

#include "gdrom/mesh.hpp"
#include "gdrom/types.hpp"

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace gdrom {

/// 7-point, degree-5 rule on the reference triangle (0,0), (1,0), (0,1);
/// weights sum to the reference area 1/2.
struct QuadratureRule {
  static constexpr int size = 7;
  std::array<Eigen::Vector2d, size> points;
  std::array<real, size> weights;
};

const QuadratureRule& dunavant7();

/// Quadratic Lagrange shape functions on the reference triangle.  Local order:
/// three vertices, then midpoints of edges 0-1, 1-2, 2-0.
namespace p2 {
std::array<real, 6> values(const Eigen::Vector2d& ref);
std::array<Eigen::Vector2d, 6> gradients(const Eigen::Vector2d& ref);
}  // namespace p2

/// Shape data of one element at one quadrature point, in physical coordinates.
struct QuadraturePoint {
  Point x;
  real weight;  // reference weight times |det J|
  std::array<real, 6> value;
  std::array<Eigen::Vector2d, 6> grad;
  std::array<real, 3> p1;  // linear (pressure) shape values
};

using ElementQuadrature = std::array<QuadraturePoint, QuadratureRule::size>;

/// P2 velocity / P1 pressure Taylor-Hood spaces on a triangulation.
///
/// Scalar P2 dofs are numbered vertices first, then edges.  Velocity
/// coefficients are component-blocked: index c * n_scalar() + s.  Pressure
/// dofs coincide with mesh vertices.
class FemSpaces {
 public:
  explicit FemSpaces(Mesh mesh);

  const Mesh& mesh() const { return mesh_; }
  const MeshEdges& edges() const { return edges_; }

  Index n_scalar() const { return n_scalar_; }
  Index n_velocity() const { return 2 * n_scalar_; }
  Index n_pressure() const { return mesh_.n_vertices(); }

  std::array<int, 6> element_dofs(Index t) const;
  const Point& dof_point(Index s) const { return dof_points_[s]; }
  const ElementQuadrature& quadrature(Index t) const { return quadrature_[t]; }

  /// Boundary tag of a scalar dof, if it lies on the boundary.  A dof shared
  /// by edges of different tags takes the no-slip tag (wall / cylinder) first,
  /// then inflow, then outflow.
  const std::optional<BoundaryTag>& dof_tag(Index s) const { return dof_tags_[s]; }

  /// Velocity dofs constrained by Dirichlet data (every tag but outflow).
  const std::vector<bool>& dirichlet_mask() const { return dirichlet_mask_; }
  /// Velocity dofs on any boundary edge.
  const std::vector<bool>& boundary_mask() const { return boundary_mask_; }

  bool has_outflow() const { return mesh_.has_tag(BoundaryTag::outflow); }

  VelocityField interpolate(const std::function<Eigen::Vector2d(const Point&)>& f) const;
  PressureField interpolate_pressure(const std::function<real(const Point&)>& f) const;

  /// Zeroes every boundary coefficient (the result lies in X_h with H^1_0 trace).
  VelocityField restrict_to_interior(VelocityField u) const;

  Eigen::Vector2d evaluate(const VelocityField& u, Index t, const Eigen::Vector2d& ref) const;
  Eigen::Vector2d value_at(const VelocityField& u, Index t, int q) const;
  Eigen::Matrix2d gradient_at(const VelocityField& u, Index t, int q) const;

 private:
  Mesh mesh_;
  MeshEdges edges_;
  Index n_scalar_ = 0;
  std::vector<Point> dof_points_;
  std::vector<std::optional<BoundaryTag>> dof_tags_;
  std::vector<bool> dirichlet_mask_;
  std::vector<bool> boundary_mask_;
  std::vector<ElementQuadrature> quadrature_;
};

/// Locates points in a triangulation through a uniform bucket grid.
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh);

  struct Hit {
    Index triangle;
    Eigen::Vector3d barycentric;
  };

  /// Containing triangle, accepting barycentric coordinates down to -tol.
  /// Falls back to the least-violating nearby triangle; nullopt if none is
  /// within tol.
  std::optional<Hit> locate(const Point& x, real tol = 1e-10) const;

 private:
  const Mesh* mesh_;
  Point lower_;
  Point cell_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<Index>> buckets_;
};

}  // namespace gdrom
