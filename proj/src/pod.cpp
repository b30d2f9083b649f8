#include "gdrom/pod.hpp"

#include "binary_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace gdrom {

namespace {

constexpr char kMagic[4] = {'G', 'D', 'P', 'B'};
constexpr std::uint32_t kVersion = 1;

void attach_stiffness(PodBasis& basis, const FomOperators& ops) {
  const MatrixX s = basis.modes.transpose() * (ops.stiffness * basis.modes);
  basis.stiffness = (s + s.transpose()) / 2.0;
  basis.stiffness_norm = 0.0;
  if (basis.size() > 0) {
    Eigen::SelfAdjointEigenSolver<MatrixX> es(basis.stiffness, Eigen::EigenvaluesOnly);
    basis.stiffness_norm = es.eigenvalues().maxCoeff();
  }
}

MatrixX fluctuations(const MatrixX& snapshots, const PodBasis& basis) {
  MatrixX u = snapshots;
  if (basis.centered) u.colwise() -= basis.mean;
  return u;
}

}  // namespace

PodBasis PodBasis::truncated(Index l) const {
  if (l < 0 || l > size()) throw std::invalid_argument("PodBasis::truncated: l out of range");
  PodBasis b = *this;
  b.modes = modes.leftCols(l);
  b.stiffness = stiffness.topLeftCorner(l, l);
  b.stiffness_norm = 0.0;
  if (l > 0) {
    Eigen::SelfAdjointEigenSolver<MatrixX> es(b.stiffness, Eigen::EigenvaluesOnly);
    b.stiffness_norm = es.eigenvalues().maxCoeff();
  }
  return b;
}

PodBasis assemble_modes(const MatrixX& snapshots, const Eigenpairs<real>& pairs, Index l, const FomOperators& ops,
                        bool centered) {
  if (l < 1 || l > pairs.rank) throw std::invalid_argument("assemble_modes: l must lie in [1, d_p]");
  if (pairs.vectors.rows() != snapshots.cols()) throw std::invalid_argument("assemble_modes: size mismatch");
  const auto m = static_cast<real>(snapshots.cols());
  PodBasis basis;
  basis.centered = centered;
  if (centered) basis.mean = snapshot_mean(snapshots);
  basis.eigenvalues = pairs.values.head(pairs.rank);
  basis.eigenvectors = pairs.vectors.leftCols(pairs.rank);
  const MatrixX u = fluctuations(snapshots, basis);
  basis.modes.resize(u.rows(), l);
  for (Index k = 0; k < l; ++k) {
    auto psi = basis.modes.col(k);
    psi = u * pairs.vectors.col(k) / std::sqrt(m * pairs.values[k]);
    fix_sign(psi);
  }
  attach_stiffness(basis, ops);
  return basis;
}

PodBasis build_pod(const SnapshotSet& snapshots, const FomOperators& ops, Index l, bool centered, real drop_tol) {
  const MatrixX k = build_correlation(snapshots.data, ops.mass, centered);
  return assemble_modes(snapshots.data, eigendecompose(k, drop_tol), l, ops, centered);
}

VectorX project(const PodBasis& basis, const SparseMatrix& mass, const VelocityField& u) {
  if (u.size() != basis.n_dofs()) throw std::invalid_argument("project: size mismatch");
  const VectorX mu = basis.centered ? VectorX(mass * (u - basis.mean)) : VectorX(mass * u);
  return basis.modes.transpose() * mu;
}

MatrixX project_columns(const PodBasis& basis, const SparseMatrix& mass, const MatrixX& u) {
  if (u.rows() != basis.n_dofs()) throw std::invalid_argument("project_columns: size mismatch");
  const MatrixX mu = mass * fluctuations(u, basis);
  return basis.modes.transpose() * mu;
}

VelocityField reconstruct(const PodBasis& basis, const VectorX& a) {
  if (a.size() != basis.size()) throw std::invalid_argument("reconstruct: size mismatch");
  VelocityField u = basis.modes * a;
  if (basis.centered) u += basis.mean;
  return u;
}

real truncation_tail(const PodBasis& basis, Index l) {
  if (l < 0 || l > basis.rank()) throw std::invalid_argument("truncation_tail: l out of range");
  return basis.eigenvalues.tail(basis.rank() - l).sum();
}

real mean_projection_error(const MatrixX& snapshots, const PodBasis& basis, const SparseMatrix& mass, Index l) {
  if (l < 0 || l > basis.size()) throw std::invalid_argument("mean_projection_error: l out of range");
  const MatrixX u = fluctuations(snapshots, basis);
  const auto psi = basis.modes.leftCols(l);
  const MatrixX r = u - psi * (psi.transpose() * (mass * u));
  return (r.transpose() * (mass * r)).trace() / static_cast<real>(u.cols());
}

real mean_gradient_projection_error(const MatrixX& snapshots, const PodBasis& basis, const FomOperators& ops,
                                    Index l) {
  if (l < 0 || l > basis.size()) throw std::invalid_argument("mean_gradient_projection_error: l out of range");
  const MatrixX u = fluctuations(snapshots, basis);
  const auto psi = basis.modes.leftCols(l);
  const MatrixX r = u - psi * (psi.transpose() * (ops.mass * u));
  return (r.transpose() * (ops.stiffness * r)).trace() / static_cast<real>(u.cols());
}

IdentitySides gradient_truncation_identity(const MatrixX& snapshots, const PodBasis& basis, const FomOperators& ops,
                                           Index l) {
  if (basis.size() != basis.rank())
    throw std::invalid_argument("gradient_truncation_identity: basis must hold all d_p modes");
  if (l < 0 || l > basis.rank()) throw std::invalid_argument("gradient_truncation_identity: l out of range");
  real rhs = 0.0;
  for (Index k = l; k < basis.rank(); ++k) rhs += basis.eigenvalues[k] * basis.stiffness(k, k);
  return {mean_gradient_projection_error(snapshots, basis, ops, l), rhs};
}

void save_basis(const std::filesystem::path& path, const PodBasis& basis) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write basis file " + path.string());
  out.write(kMagic, 4);
  detail::put(out, kVersion);
  detail::put(out, static_cast<std::uint64_t>(basis.size()));
  detail::put(out, static_cast<std::uint64_t>(basis.n_dofs()));
  detail::put(out, static_cast<std::uint32_t>(basis.centered));
  detail::put(out, static_cast<std::uint64_t>(basis.rank()));
  detail::put_block(out, basis.eigenvalues);
  if (basis.centered) detail::put_block(out, basis.mean);
  detail::put_block(out, basis.modes);
  out.close();
  if (out.fail()) throw IoError("write failed for " + path.string());
}

PodBasis load_basis(const std::filesystem::path& path, const FomOperators& ops) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open basis file " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw IoError("bad basis magic in " + path.string());
  if (detail::get<std::uint32_t>(in, path) != kVersion) throw IoError("unsupported basis version in " + path.string());
  const auto l = static_cast<Index>(detail::get<std::uint64_t>(in, path));
  const auto n = static_cast<Index>(detail::get<std::uint64_t>(in, path));
  PodBasis basis;
  basis.centered = detail::get<std::uint32_t>(in, path) != 0;
  const auto rank = static_cast<Index>(detail::get<std::uint64_t>(in, path));
  if (l > rank) throw IoError("inconsistent basis header in " + path.string());
  if (n != ops.mass.rows()) throw IoError("basis " + path.string() + " does not match the mesh");
  basis.eigenvalues.resize(rank);
  detail::get_block(in, basis.eigenvalues, path);
  if (basis.centered) {
    basis.mean.resize(n);
    detail::get_block(in, basis.mean, path);
  }
  basis.modes.resize(n, l);
  detail::get_block(in, basis.modes, path);
  attach_stiffness(basis, ops);
  return basis;
}

}  // namespace gdrom
