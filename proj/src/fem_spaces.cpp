#include "gdrom/fem_spaces.hpp"

#include "gdrom/errors.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace gdrom {

const QuadratureRule& dunavant7() {
  static const QuadratureRule rule = [] {
    QuadratureRule r;
    const real s15 = std::sqrt(15.0);
    const real a = (6.0 - s15) / 21.0;
    const real b = (6.0 + s15) / 21.0;
    const real wa = (155.0 - s15) / 2400.0;
    const real wb = (155.0 + s15) / 2400.0;
    r.points = {Eigen::Vector2d(1.0 / 3.0, 1.0 / 3.0),
                Eigen::Vector2d(a, a), Eigen::Vector2d(1.0 - 2.0 * a, a), Eigen::Vector2d(a, 1.0 - 2.0 * a),
                Eigen::Vector2d(b, b), Eigen::Vector2d(1.0 - 2.0 * b, b), Eigen::Vector2d(b, 1.0 - 2.0 * b)};
    r.weights = {9.0 / 80.0, wa, wa, wa, wb, wb, wb};
    return r;
  }();
  return rule;
}

namespace p2 {

std::array<real, 6> values(const Eigen::Vector2d& ref) {
  const real l1 = ref.x(), l2 = ref.y(), l0 = 1.0 - l1 - l2;
  return {l0 * (2.0 * l0 - 1.0), l1 * (2.0 * l1 - 1.0), l2 * (2.0 * l2 - 1.0),
          4.0 * l0 * l1,         4.0 * l1 * l2,         4.0 * l2 * l0};
}

std::array<Eigen::Vector2d, 6> gradients(const Eigen::Vector2d& ref) {
  const real l1 = ref.x(), l2 = ref.y(), l0 = 1.0 - l1 - l2;
  const Eigen::Vector2d g0(-1.0, -1.0), g1(1.0, 0.0), g2(0.0, 1.0);
  return {(4.0 * l0 - 1.0) * g0,
          (4.0 * l1 - 1.0) * g1,
          (4.0 * l2 - 1.0) * g2,
          4.0 * (l0 * g1 + l1 * g0),
          4.0 * (l1 * g2 + l2 * g1),
          4.0 * (l2 * g0 + l0 * g2)};
}

}  // namespace p2

FemSpaces::FemSpaces(Mesh mesh) : mesh_(std::move(mesh)), edges_(build_edges(mesh_)) {
  const Index nv = mesh_.n_vertices();
  const Index ne = static_cast<Index>(edges_.edges.size());
  n_scalar_ = nv + ne;

  dof_points_.resize(n_scalar_);
  for (Index i = 0; i < nv; ++i) dof_points_[i] = mesh_.vertex(i);
  for (Index e = 0; e < ne; ++e)
    dof_points_[nv + e] = 0.5 * (mesh_.vertex(edges_.edges[e][0]) + mesh_.vertex(edges_.edges[e][1]));

  // Tag priority: no-slip beats inflow beats outflow.
  auto rank = [](BoundaryTag tag) {
    switch (tag) {
      case BoundaryTag::wall:
      case BoundaryTag::cylinder: return 2;
      case BoundaryTag::inflow: return 1;
      case BoundaryTag::outflow: return 0;
    }
    return 0;
  };
  dof_tags_.assign(n_scalar_, std::nullopt);
  auto assign = [&](Index s, BoundaryTag tag) {
    if (!dof_tags_[s] || rank(tag) > rank(*dof_tags_[s])) dof_tags_[s] = tag;
  };
  std::map<std::array<int, 2>, Index> edge_index;
  for (Index e = 0; e < ne; ++e) edge_index[edges_.edges[e]] = e;
  for (const auto& be : mesh_.boundary()) {
    auto a = be.vertices[0], b = be.vertices[1];
    const Index e = edge_index.at(a < b ? std::array{a, b} : std::array{b, a});
    assign(a, be.tag);
    assign(b, be.tag);
    assign(nv + e, be.tag);
  }

  dirichlet_mask_.assign(n_velocity(), false);
  boundary_mask_.assign(n_velocity(), false);
  for (Index s = 0; s < n_scalar_; ++s) {
    if (!dof_tags_[s]) continue;
    for (int c = 0; c < 2; ++c) {
      boundary_mask_[c * n_scalar_ + s] = true;
      dirichlet_mask_[c * n_scalar_ + s] = *dof_tags_[s] != BoundaryTag::outflow;
    }
  }

  const auto& rule = dunavant7();
  quadrature_.resize(mesh_.n_triangles());
  for (Index t = 0; t < mesh_.n_triangles(); ++t) {
    const Point x0 = mesh_.vertex(mesh_.triangles()(0, t));
    const Point x1 = mesh_.vertex(mesh_.triangles()(1, t));
    const Point x2 = mesh_.vertex(mesh_.triangles()(2, t));
    Eigen::Matrix2d jac;
    jac.col(0) = x1 - x0;
    jac.col(1) = x2 - x0;
    const real det = jac.determinant();
    const Eigen::Matrix2d inv_t = jac.inverse().transpose();
    for (int q = 0; q < QuadratureRule::size; ++q) {
      const auto& ref = rule.points[q];
      auto& qp = quadrature_[t][q];
      qp.x = x0 + jac * ref;
      qp.weight = rule.weights[q] * det;
      qp.value = p2::values(ref);
      const auto g = p2::gradients(ref);
      for (int i = 0; i < 6; ++i) qp.grad[i] = inv_t * g[i];
      qp.p1 = {1.0 - ref.x() - ref.y(), ref.x(), ref.y()};
    }
  }
}

std::array<int, 6> FemSpaces::element_dofs(Index t) const {
  const auto& tri = mesh_.triangles();
  const int nv = static_cast<int>(mesh_.n_vertices());
  return {tri(0, t), tri(1, t), tri(2, t), nv + edges_.triangle_edges(0, t),
          nv + edges_.triangle_edges(1, t), nv + edges_.triangle_edges(2, t)};
}

VelocityField FemSpaces::interpolate(const std::function<Eigen::Vector2d(const Point&)>& f) const {
  VelocityField u(n_velocity());
  for (Index s = 0; s < n_scalar_; ++s) {
    const Eigen::Vector2d v = f(dof_points_[s]);
    u[s] = v.x();
    u[n_scalar_ + s] = v.y();
  }
  return u;
}

PressureField FemSpaces::interpolate_pressure(const std::function<real(const Point&)>& f) const {
  PressureField p(n_pressure());
  for (Index i = 0; i < n_pressure(); ++i) p[i] = f(mesh_.vertex(i));
  return p;
}

VelocityField FemSpaces::restrict_to_interior(VelocityField u) const {
  for (Index i = 0; i < n_velocity(); ++i)
    if (boundary_mask_[i]) u[i] = 0.0;
  return u;
}

Eigen::Vector2d FemSpaces::evaluate(const VelocityField& u, Index t, const Eigen::Vector2d& ref) const {
  const auto dofs = element_dofs(t);
  const auto n = p2::values(ref);
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  for (int i = 0; i < 6; ++i) v += n[i] * Eigen::Vector2d(u[dofs[i]], u[n_scalar_ + dofs[i]]);
  return v;
}

Eigen::Vector2d FemSpaces::value_at(const VelocityField& u, Index t, int q) const {
  const auto dofs = element_dofs(t);
  const auto& qp = quadrature_[t][q];
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  for (int i = 0; i < 6; ++i) v += qp.value[i] * Eigen::Vector2d(u[dofs[i]], u[n_scalar_ + dofs[i]]);
  return v;
}

Eigen::Matrix2d FemSpaces::gradient_at(const VelocityField& u, Index t, int q) const {
  const auto dofs = element_dofs(t);
  const auto& qp = quadrature_[t][q];
  Eigen::Matrix2d g = Eigen::Matrix2d::Zero();  // g(c, d) = d u_c / d x_d
  for (int i = 0; i < 6; ++i) {
    g.row(0) += u[dofs[i]] * qp.grad[i].transpose();
    g.row(1) += u[n_scalar_ + dofs[i]] * qp.grad[i].transpose();
  }
  return g;
}

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh) {
  const auto& v = mesh.vertices();
  lower_ = v.rowwise().minCoeff();
  const Point upper = v.rowwise().maxCoeff();
  const real n = std::max<real>(1.0, std::sqrt(static_cast<real>(mesh.n_triangles())));
  const Point extent = (upper - lower_).cwiseMax(1e-300);
  const real aspect = extent.x() / extent.y();
  nx_ = std::max(1, static_cast<int>(std::ceil(n * std::sqrt(aspect))));
  ny_ = std::max(1, static_cast<int>(std::ceil(n / std::sqrt(aspect))));
  cell_ = Point(extent.x() / nx_, extent.y() / ny_);
  buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (Index t = 0; t < mesh.n_triangles(); ++t) {
    Point lo = mesh.vertex(mesh.triangles()(0, t)), hi = lo;
    for (int k = 1; k < 3; ++k) {
      lo = lo.cwiseMin(mesh.vertex(mesh.triangles()(k, t)));
      hi = hi.cwiseMax(mesh.vertex(mesh.triangles()(k, t)));
    }
    const int i0 = std::clamp(static_cast<int>(std::floor((lo.x() - lower_.x()) / cell_.x())) - 1, 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>(std::floor((hi.x() - lower_.x()) / cell_.x())) + 1, 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>(std::floor((lo.y() - lower_.y()) / cell_.y())) - 1, 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>(std::floor((hi.y() - lower_.y()) / cell_.y())) + 1, 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(t);
  }
}

std::optional<PointLocator::Hit> PointLocator::locate(const Point& x, real tol) const {
  const int i = std::clamp(static_cast<int>(std::floor((x.x() - lower_.x()) / cell_.x())), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor((x.y() - lower_.y()) / cell_.y())), 0, ny_ - 1);
  std::optional<Hit> best;
  real best_min = -std::numeric_limits<real>::infinity();
  for (Index t : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
    const Point x0 = mesh_->vertex(mesh_->triangles()(0, t));
    Eigen::Matrix2d jac;
    jac.col(0) = mesh_->vertex(mesh_->triangles()(1, t)) - x0;
    jac.col(1) = mesh_->vertex(mesh_->triangles()(2, t)) - x0;
    const Eigen::Vector2d ref = jac.partialPivLu().solve(x - x0);
    const Eigen::Vector3d bary(1.0 - ref.x() - ref.y(), ref.x(), ref.y());
    const real m = bary.minCoeff();
    if (m > best_min) {
      best_min = m;
      best = Hit{t, bary};
      if (m >= 0.0) break;
    }
  }
  if (!best || best_min < -tol) return std::nullopt;
  return best;
}

}  // namespace gdrom
