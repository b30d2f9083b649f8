#include "gdrom/nudging.hpp"

#include "gdrom/errors.hpp"

#include <cmath>
#include <numbers>

namespace gdrom {

std::string to_string(InterpKind kind) {
  switch (kind) {
    case InterpKind::nodal:
      return "nodal";
    case InterpKind::piecewise_constant:
      return "pc";
    case InterpKind::identity:
      return "identity";
  }
  return "?";
}

InterpKind parse_interp_kind(const std::string& name) {
  if (name == "nodal") return InterpKind::nodal;
  if (name == "pc") return InterpKind::piecewise_constant;
  if (name == "identity") return InterpKind::identity;
  throw std::invalid_argument("unknown interpolation kind '" + name + "'");
}

namespace {

SparseMatrix from_triplets(Index rows, Index cols, const std::vector<Triplet>& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.prune(0.0);
  return m;
}

// Adds the same entry to both velocity components.
void push2(std::vector<Triplet>& t, Index row, Index col, Index row_stride, Index col_stride, real v) {
  t.emplace_back(row, col, v);
  t.emplace_back(row_stride + row, col_stride + col, v);
}

void build_nodal(const FemSpaces& fine, const Mesh& coarse, const PointLocator& coarse_locator,
                 SparseMatrix& sampling, SparseMatrix& gram, SparseMatrix& cross) {
  const Index nc = coarse.n_vertices(), ns = fine.n_scalar();
  const PointLocator fine_locator(fine.mesh());
  std::vector<Triplet> e, g, x;
  for (Index i = 0; i < nc; ++i) {
    const auto hit = fine_locator.locate(coarse.vertex(i));
    if (!hit) throw GeometryError("coarse vertex " + std::to_string(i) + " lies outside the fine mesh");
    const auto values = p2::values(hit->barycentric.tail<2>());
    const auto dofs = fine.element_dofs(hit->triangle);
    for (int a = 0; a < 6; ++a) push2(e, i, dofs[a], nc, ns, values[a]);
  }
  for (Index t = 0; t < coarse.n_triangles(); ++t) {
    const real area = coarse.triangle_area(t);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        push2(g, coarse.triangles()(a, t), coarse.triangles()(b, t), nc, nc, area / 12.0 * (a == b ? 2.0 : 1.0));
  }
  for (Index t = 0; t < fine.mesh().n_triangles(); ++t) {
    const auto dofs = fine.element_dofs(t);
    for (const auto& qp : fine.quadrature(t)) {
      const auto hit = coarse_locator.locate(qp.x);
      if (!hit) throw GeometryError("fine quadrature point outside the coarse mesh");
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 6; ++b)
          push2(x, coarse.triangles()(a, hit->triangle), dofs[b], nc, ns,
                qp.weight * hit->barycentric[a] * qp.value[b]);
    }
  }
  sampling = from_triplets(2 * nc, 2 * ns, e);
  gram = from_triplets(2 * nc, 2 * nc, g);
  cross = from_triplets(2 * nc, 2 * ns, x);
}

}  // namespace

CoarseInterp build_coarse_interp(const FemSpaces& fine, Mesh coarse, InterpKind kind) {
  if (kind == InterpKind::identity) throw std::invalid_argument("build_coarse_interp: use identity_interp");
  CoarseInterp out;
  out.kind_ = kind;
  out.fine_ = &fine;
  out.resolution_ = coarse.h();
  out.coarse_ = std::make_shared<const Mesh>(std::move(coarse));
  out.locator_ = std::make_shared<const PointLocator>(*out.coarse_);
  const Mesh& cm = *out.coarse_;
  const Index ns = fine.n_scalar();

  if (kind == InterpKind::nodal) {
    build_nodal(fine, cm, *out.locator_, out.sampling_, out.gram_, out.cross_);
    return out;
  }

  const Index nc = cm.n_triangles();
  out.cell_weight_.assign(nc, 0.0);
  out.cell_of_point_.resize(fine.mesh().n_triangles());
  for (Index t = 0; t < fine.mesh().n_triangles(); ++t)
    for (int q = 0; q < QuadratureRule::size; ++q) {
      const auto& qp = fine.quadrature(t)[q];
      const auto hit = out.locator_->locate(qp.x);
      if (!hit) throw GeometryError("fine quadrature point outside the coarse mesh");
      out.cell_of_point_[t][q] = hit->triangle;
      out.cell_weight_[hit->triangle] += qp.weight;
    }
  std::vector<Triplet> e, g, x;
  for (Index t = 0; t < fine.mesh().n_triangles(); ++t) {
    const auto dofs = fine.element_dofs(t);
    for (int q = 0; q < QuadratureRule::size; ++q) {
      const auto& qp = fine.quadrature(t)[q];
      const Index c = out.cell_of_point_[t][q];
      for (int b = 0; b < 6; ++b) {
        push2(e, c, dofs[b], nc, ns, qp.weight * qp.value[b] / out.cell_weight_[c]);
        push2(x, c, dofs[b], nc, ns, qp.weight * qp.value[b]);
      }
    }
  }
  for (Index c = 0; c < nc; ++c) push2(g, c, c, nc, nc, out.cell_weight_[c]);
  out.sampling_ = from_triplets(2 * nc, 2 * ns, e);
  out.gram_ = from_triplets(2 * nc, 2 * nc, g);
  out.cross_ = from_triplets(2 * nc, 2 * ns, x);
  return out;
}

CoarseInterp identity_interp(const FemSpaces& fine, const FomOperators& ops) {
  CoarseInterp out;
  out.kind_ = InterpKind::identity;
  out.fine_ = &fine;
  out.resolution_ = fine.mesh().h();
  out.locator_ = std::make_shared<const PointLocator>(fine.mesh());
  out.sampling_.resize(fine.n_velocity(), fine.n_velocity());
  out.sampling_.setIdentity();
  out.gram_ = ops.mass;
  out.cross_ = ops.mass;
  return out;
}

VectorX CoarseInterp::apply(const std::function<Eigen::Vector2d(const Point&)>& f) const {
  switch (kind_) {
    case InterpKind::identity:
      return fine_->interpolate(f);
    case InterpKind::nodal: {
      const Index nc = coarse_->n_vertices();
      VectorX c(2 * nc);
      for (Index i = 0; i < nc; ++i) {
        const Eigen::Vector2d v = f(coarse_->vertex(i));
        c[i] = v.x();
        c[nc + i] = v.y();
      }
      return c;
    }
    case InterpKind::piecewise_constant: {
      const Index nc = coarse_->n_triangles();
      VectorX c = VectorX::Zero(2 * nc);
      for (Index t = 0; t < fine_->mesh().n_triangles(); ++t)
        for (int q = 0; q < QuadratureRule::size; ++q) {
          const auto& qp = fine_->quadrature(t)[q];
          const Index cell = cell_of_point_[t][q];
          const Eigen::Vector2d v = qp.weight / cell_weight_[cell] * f(qp.x);
          c[cell] += v.x();
          c[nc + cell] += v.y();
        }
      return c;
    }
  }
  return {};
}

Eigen::Vector2d CoarseInterp::evaluate(const VectorX& c, const Point& x) const {
  if (c.size() != n_coarse()) throw std::invalid_argument("CoarseInterp::evaluate: size mismatch");
  const auto hit = locator_->locate(x);
  if (!hit) throw GeometryError("evaluation point outside the mesh");
  switch (kind_) {
    case InterpKind::identity:
      return fine_->evaluate(c, hit->triangle, hit->barycentric.tail<2>());
    case InterpKind::nodal: {
      const Index nc = coarse_->n_vertices();
      Eigen::Vector2d v = Eigen::Vector2d::Zero();
      for (int a = 0; a < 3; ++a) {
        const Index i = coarse_->triangles()(a, hit->triangle);
        v += hit->barycentric[a] * Eigen::Vector2d(c[i], c[nc + i]);
      }
      return v;
    }
    case InterpKind::piecewise_constant: {
      const Index nc = coarse_->n_triangles();
      return {c[hit->triangle], c[nc + hit->triangle]};
    }
  }
  return {};
}

real CoarseInterp::distance(const VelocityField& u, const SparseMatrix& mass) const {
  const VectorX c = apply(u);
  const real sq = u.dot(mass * u) - 2.0 * c.dot(cross_ * u) + c.dot(gram_ * c);
  return std::sqrt(std::max(sq, 0.0));
}

InterpConstants estimate_constants(const CoarseInterp& interp, const FomOperators& ops,
                                   const std::vector<VelocityField>& probes) {
  InterpConstants out;
  for (const auto& u : probes) {
    const real norm = l2_norm(ops, u);
    if (norm == 0.0) continue;
    out.c0 = std::max(out.c0, interp.norm(interp.apply(u)) / norm);
    const real grad = h1_seminorm(ops, u);
    if (grad <= 1e-6 * norm) continue;
    out.ci = std::max(out.ci, interp.distance(u, ops.mass) / (interp.resolution() * grad));
  }
  return out;
}

std::vector<VelocityField> standard_probes(const FemSpaces& spaces) {
  using std::numbers::pi;
  std::vector<VelocityField> probes;
  probes.push_back(spaces.interpolate([](const Point&) { return Eigen::Vector2d(1.0, 0.0); }));
  probes.push_back(spaces.interpolate([](const Point&) { return Eigen::Vector2d(0.0, 1.0); }));
  probes.push_back(spaces.interpolate([](const Point& x) { return Eigen::Vector2d(x.x(), x.y()); }));
  probes.push_back(spaces.interpolate([](const Point& x) { return Eigen::Vector2d(-x.y(), x.x()); }));
  for (int k = 1; k <= 4; ++k)
    for (int m = 1; m <= 4; ++m)
      probes.push_back(spaces.interpolate([k, m](const Point& x) {
        return Eigen::Vector2d(std::sin(k * pi * x.x()) * std::sin(m * pi * x.y()),
                               std::cos(m * pi * x.x()) * std::sin(k * pi * x.y()));
      }));
  return probes;
}

Index NudgingAlgebra::observation_index(real t) const {
  if (count() == 0) throw std::invalid_argument("NudgingAlgebra: no observations");
  const auto j = static_cast<long long>(std::llround((t - t_first) / dt));
  const auto n = static_cast<long long>(count());
  return static_cast<Index>(((j % n) + n) % n);
}

NudgingAlgebra build_nudging_algebra(const PodBasis& basis, const CoarseInterp& interp,
                                     const SnapshotSet& observations, real beta) {
  if (beta > 0.0 && observations.count() == 0)
    throw std::invalid_argument("build_nudging_algebra: nudging needs observations");
  if (interp.sampling().cols() != basis.n_dofs())
    throw std::invalid_argument("build_nudging_algebra: basis and interpolant on different spaces");
  NudgingAlgebra out;
  const MatrixX sampled = interp.sampling() * basis.modes;
  const MatrixX weighted = interp.gram() * sampled;
  const MatrixX gram = sampled.transpose() * weighted;
  out.gram = (gram + gram.transpose()) / 2.0;
  out.weights = (interp.sampling().transpose() * weighted).transpose();
  if (observations.count() > 0) out.data = out.weights * observations.data;
  out.t_first = observations.t_first;
  out.dt = observations.dt;
  return out;
}

}  // namespace gdrom
