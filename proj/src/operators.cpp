#include "gdrom/operators.hpp"

#include "gdrom/errors.hpp"

#include <cmath>

namespace gdrom {

namespace {

SparseMatrix block_diag2(const SparseMatrix& s) {
  const Index n = s.rows();
  std::vector<Triplet> t;
  t.reserve(2 * s.nonZeros());
  for (Index k = 0; k < s.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(s, k); it; ++it) {
      t.emplace_back(it.row(), it.col(), it.value());
      t.emplace_back(n + it.row(), n + it.col(), it.value());
    }
  SparseMatrix out(2 * n, 2 * n);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace

FomOperators assemble_operators(const FemSpaces& spaces) {
  const Index ns = spaces.n_scalar();
  const Index nt = spaces.mesh().n_triangles();
  std::vector<Triplet> mass, stiff, div, gd, pmass;
  mass.reserve(36 * nt);
  stiff.reserve(36 * nt);
  div.reserve(36 * nt);
  gd.reserve(144 * nt);
  pmass.reserve(9 * nt);
  VectorX pint = VectorX::Zero(spaces.n_pressure());

  for (Index t = 0; t < nt; ++t) {
    const auto dofs = spaces.element_dofs(t);
    const auto& tri = spaces.mesh().triangles();
    Eigen::Matrix<real, 6, 6> me = Eigen::Matrix<real, 6, 6>::Zero(), ae = me;
    Eigen::Matrix<real, 3, 12> be = Eigen::Matrix<real, 3, 12>::Zero();
    Eigen::Matrix<real, 12, 12> ge = Eigen::Matrix<real, 12, 12>::Zero();
    Eigen::Matrix3d pe = Eigen::Matrix3d::Zero();
    Eigen::Vector3d pi = Eigen::Vector3d::Zero();
    for (const auto& qp : spaces.quadrature(t)) {
      Eigen::Matrix<real, 12, 1> divphi;  // divergence of local vector basis (c, i) -> c * 6 + i
      for (int i = 0; i < 6; ++i) {
        divphi[i] = qp.grad[i].x();
        divphi[6 + i] = qp.grad[i].y();
        for (int j = 0; j < 6; ++j) {
          me(i, j) += qp.weight * qp.value[i] * qp.value[j];
          ae(i, j) += qp.weight * qp.grad[i].dot(qp.grad[j]);
        }
      }
      ge += qp.weight * divphi * divphi.transpose();
      for (int a = 0; a < 3; ++a) {
        be.row(a) += qp.weight * qp.p1[a] * divphi.transpose();
        pi[a] += qp.weight * qp.p1[a];
        for (int b = 0; b < 3; ++b) pe(a, b) += qp.weight * qp.p1[a] * qp.p1[b];
      }
    }
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        mass.emplace_back(dofs[i], dofs[j], me(i, j));
        stiff.emplace_back(dofs[i], dofs[j], ae(i, j));
      }
    for (int ci = 0; ci < 12; ++ci)
      for (int cj = 0; cj < 12; ++cj)
        gd.emplace_back((ci / 6) * ns + dofs[ci % 6], (cj / 6) * ns + dofs[cj % 6], ge(ci, cj));
    for (int a = 0; a < 3; ++a) {
      pint[tri(a, t)] += pi[a];
      for (int cj = 0; cj < 12; ++cj) div.emplace_back(tri(a, t), (cj / 6) * ns + dofs[cj % 6], be(a, cj));
      for (int b = 0; b < 3; ++b) pmass.emplace_back(tri(a, t), tri(b, t), pe(a, b));
    }
  }

  FomOperators ops;
  SparseMatrix ms(ns, ns), as(ns, ns);
  ms.setFromTriplets(mass.begin(), mass.end());
  as.setFromTriplets(stiff.begin(), stiff.end());
  ops.mass = block_diag2(ms);
  ops.stiffness = block_diag2(as);
  ops.divergence.resize(spaces.n_pressure(), spaces.n_velocity());
  ops.divergence.setFromTriplets(div.begin(), div.end());
  ops.grad_div.resize(spaces.n_velocity(), spaces.n_velocity());
  ops.grad_div.setFromTriplets(gd.begin(), gd.end());
  ops.pressure_mass.resize(spaces.n_pressure(), spaces.n_pressure());
  ops.pressure_mass.setFromTriplets(pmass.begin(), pmass.end());
  ops.pressure_integrals = std::move(pint);
  return ops;
}

SparseMatrix convection_matrix(const FemSpaces& spaces, const VelocityField& w) {
  if (w.size() != spaces.n_velocity()) throw std::invalid_argument("convection_matrix: size mismatch");
  const Index ns = spaces.n_scalar();
  const Index nt = spaces.mesh().n_triangles();
  std::vector<Triplet> trip;
  trip.reserve(72 * nt);
  for (Index t = 0; t < nt; ++t) {
    const auto dofs = spaces.element_dofs(t);
    Eigen::Matrix<real, 6, 6> ce = Eigen::Matrix<real, 6, 6>::Zero();
    for (int q = 0; q < QuadratureRule::size; ++q) {
      const auto& qp = spaces.quadrature(t)[q];
      Eigen::Vector2d wq = Eigen::Vector2d::Zero();
      real divw = 0.0;
      for (int i = 0; i < 6; ++i) {
        const Eigen::Vector2d wi(w[dofs[i]], w[ns + dofs[i]]);
        wq += qp.value[i] * wi;
        divw += wi.x() * qp.grad[i].x() + wi.y() * qp.grad[i].y();
      }
      for (int j = 0; j < 6; ++j) {
        const real adv = wq.dot(qp.grad[j]) + 0.5 * divw * qp.value[j];
        for (int i = 0; i < 6; ++i) ce(i, j) += qp.weight * qp.value[i] * adv;
      }
    }
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        trip.emplace_back(dofs[i], dofs[j], ce(i, j));
        trip.emplace_back(ns + dofs[i], ns + dofs[j], ce(i, j));
      }
  }
  SparseMatrix c(spaces.n_velocity(), spaces.n_velocity());
  c.setFromTriplets(trip.begin(), trip.end());
  return c;
}

real convection_apply(const FemSpaces& spaces, const VelocityField& w, const VelocityField& v,
                      const VelocityField& phi) {
  const Index n = spaces.n_velocity();
  if (w.size() != n || v.size() != n || phi.size() != n)
    throw std::invalid_argument("convection_apply: fields must live on the same velocity space");
  real sum = 0.0;
  for (Index t = 0; t < spaces.mesh().n_triangles(); ++t) {
    for (int q = 0; q < QuadratureRule::size; ++q) {
      const Eigen::Vector2d wq = spaces.value_at(w, t, q);
      const Eigen::Vector2d vq = spaces.value_at(v, t, q);
      const Eigen::Vector2d pq = spaces.value_at(phi, t, q);
      const Eigen::Matrix2d gw = spaces.gradient_at(w, t, q);
      const Eigen::Matrix2d gv = spaces.gradient_at(v, t, q);
      sum += spaces.quadrature(t)[q].weight * ((gv * wq).dot(pq) + 0.5 * gw.trace() * vq.dot(pq));
    }
  }
  return sum;
}

VectorX load_vector(const FemSpaces& spaces, const std::function<Eigen::Vector2d(const Point&)>& f) {
  const Index ns = spaces.n_scalar();
  VectorX b = VectorX::Zero(spaces.n_velocity());
  for (Index t = 0; t < spaces.mesh().n_triangles(); ++t) {
    const auto dofs = spaces.element_dofs(t);
    for (const auto& qp : spaces.quadrature(t)) {
      const Eigen::Vector2d fq = f(qp.x);
      for (int i = 0; i < 6; ++i) {
        b[dofs[i]] += qp.weight * qp.value[i] * fq.x();
        b[ns + dofs[i]] += qp.weight * qp.value[i] * fq.y();
      }
    }
  }
  return b;
}

namespace {

template <class Integrand>
MatrixX field_gram(const FemSpaces& spaces, const MatrixX& fields, Integrand&& integrand) {
  const Index m = fields.cols();
  MatrixX g = MatrixX::Zero(m, m);
  std::vector<Eigen::Matrix2d> grads(m);
  for (Index t = 0; t < spaces.mesh().n_triangles(); ++t) {
    for (int q = 0; q < QuadratureRule::size; ++q) {
      for (Index i = 0; i < m; ++i) grads[i] = spaces.gradient_at(fields.col(i), t, q);
      const real w = spaces.quadrature(t)[q].weight;
      for (Index i = 0; i < m; ++i)
        for (Index j = 0; j <= i; ++j) g(i, j) += w * integrand(grads[i], grads[j]);
    }
  }
  return g.selfadjointView<Eigen::Lower>();
}

}  // namespace

MatrixX gradient_gram(const FemSpaces& spaces, const MatrixX& fields) {
  return field_gram(spaces, fields,
                    [](const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) { return (a.array() * b.array()).sum(); });
}

MatrixX divergence_gram(const FemSpaces& spaces, const MatrixX& fields) {
  return field_gram(spaces, fields,
                    [](const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) { return a.trace() * b.trace(); });
}

SaddlePointSolver::SaddlePointSolver(const FomOperators& ops, std::vector<bool> constrained,
                                     bool mean_constraint)
    : ops_(&ops),
      constrained_(std::move(constrained)),
      mean_constraint_(mean_constraint),
      n_u_(ops.mass.rows()),
      n_p_(ops.divergence.rows()) {
  if (static_cast<Index>(constrained_.size()) != n_u_)
    throw std::invalid_argument("SaddlePointSolver: mask size mismatch");
}

void SaddlePointSolver::factorize(const SparseMatrix& k, long step) {
  const Index n = n_u_ + n_p_ + (mean_constraint_ ? 1 : 0);
  std::vector<Triplet> t;
  t.reserve(k.nonZeros() + 2 * ops_->divergence.nonZeros() + 2 * n_p_ + n_u_);
  for (Index col = 0; col < k.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(k, col); it; ++it)
      if (!constrained_[it.row()]) t.emplace_back(it.row(), it.col(), it.value());
  for (Index i = 0; i < n_u_; ++i)
    if (constrained_[i]) t.emplace_back(i, i, 1.0);
  const SparseMatrix& b = ops_->divergence;
  for (Index col = 0; col < b.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(b, col); it; ++it) {
      t.emplace_back(n_u_ + it.row(), it.col(), -it.value());
      if (!constrained_[it.col()]) t.emplace_back(it.col(), n_u_ + it.row(), -it.value());
    }
  if (mean_constraint_) {
    for (Index i = 0; i < n_p_; ++i) {
      t.emplace_back(n_u_ + i, n - 1, ops_->pressure_integrals[i]);
      t.emplace_back(n - 1, n_u_ + i, ops_->pressure_integrals[i]);
    }
  }
  system_.resize(n, n);
  system_.setFromTriplets(t.begin(), t.end());
  system_.makeCompressed();

  std::vector<int> pattern(system_.outerIndexPtr(), system_.outerIndexPtr() + n + 1);
  pattern.insert(pattern.end(), system_.innerIndexPtr(), system_.innerIndexPtr() + system_.nonZeros());
  if (!analyzed_ || pattern != pattern_) {
    lu_.analyzePattern(system_);
    pattern_ = std::move(pattern);
    analyzed_ = true;
  }
  lu_.factorize(system_);
  if (lu_.info() != Eigen::Success) throw SolverError(step, "sparse LU factorization failed: " + lu_.lastErrorMessage());
}

SaddlePointSolver::Solution SaddlePointSolver::solve(const VectorX& rhs, const VectorX& values) const {
  const Index n = system_.rows();
  VectorX full = VectorX::Zero(n);
  for (Index i = 0; i < n_u_; ++i) full[i] = constrained_[i] ? values[i] : rhs[i];
  VectorX x = lu_.solve(full);
  if (!x.allFinite()) throw SolverError(-1, "saddle-point solve produced non-finite values");
  VectorX u = x.head(n_u_);
  for (Index i = 0; i < n_u_; ++i)
    if (constrained_[i]) u[i] = values[i];
  return {std::move(u), x.segment(n_u_, n_p_)};
}

}  // namespace gdrom
