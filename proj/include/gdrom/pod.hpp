#pragma once

#include "gdrom/operators.hpp"
#include "gdrom/snapshots.hpp"

#include <Eigen/Eigenvalues>

#include <filesystem>
#include <stdexcept>

namespace gdrom {

/// Column mean of a snapshot matrix.
template <class Scalar>
Vec<Scalar> snapshot_mean(const Mat<Scalar>& snapshots) {
  return snapshots.rowwise().mean();
}

/// Method-of-snapshots correlation matrix K_ij = (1/M) (u_i, u_j), mass-weighted.
/// When centered, the snapshot mean is removed first.
template <class Scalar>
Mat<Scalar> build_correlation(const Mat<Scalar>& snapshots, const SpMat<Scalar>& mass, bool centered) {
  if (snapshots.cols() < 1) throw std::invalid_argument("build_correlation: no snapshots");
  if (snapshots.rows() != mass.rows()) throw std::invalid_argument("build_correlation: size mismatch");
  Mat<Scalar> u = snapshots;
  if (centered) u.colwise() -= snapshot_mean(snapshots);
  const Mat<Scalar> mu = mass * u;
  Mat<Scalar> k = (u.transpose() * mu) / static_cast<Scalar>(u.cols());
  return (k + k.transpose()) / Scalar(2);
}

/// Eigenpairs sorted by decreasing eigenvalue.  rank counts eigenvalues above
/// drop_tol * lambda_1.
template <class Scalar>
struct Eigenpairs {
  Vec<Scalar> values;
  Mat<Scalar> vectors;
  Index rank = 0;
};

template <class Scalar>
Eigenpairs<Scalar> eigendecompose(const Mat<Scalar>& k, Scalar drop_tol = Scalar(1e-10)) {
  if (k.rows() != k.cols() || k.rows() == 0) throw std::invalid_argument("eigendecompose: matrix not square");
  const Scalar scale = k.cwiseAbs().maxCoeff();
  if ((k - k.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale)
    throw std::invalid_argument("eigendecompose: matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(k);
  if (es.info() != Eigen::Success) throw std::invalid_argument("eigendecompose: no convergence");
  const Index n = k.rows();
  Eigenpairs<Scalar> out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  const Scalar top = out.values[0];
  while (out.rank < n && top > Scalar(0) && out.values[out.rank] > drop_tol * top) ++out.rank;
  return out;
}

/// Flips v so that its largest-magnitude entry is positive.
template <class Derived>
void fix_sign(Eigen::MatrixBase<Derived>& v) {
  Index i = 0;
  v.cwiseAbs().maxCoeff(&i);
  if (v(i) < 0) v = -v;
}

/// Orthonormal POD basis psi_1..psi_l with its spectral data.
struct PodBasis {
  VectorX eigenvalues;  // lambda_1 >= ... >= lambda_{d_p} > 0
  MatrixX eigenvectors;  // M x d_p; empty when loaded from disk
  MatrixX modes;         // n_u x l
  bool centered = false;
  VectorX mean;          // empty unless centered
  MatrixX stiffness;     // S_ij = (grad psi_i, grad psi_j)
  real stiffness_norm = 0.0;

  Index size() const { return modes.cols(); }
  Index rank() const { return eigenvalues.size(); }
  Index n_dofs() const { return modes.rows(); }
  /// The first l modes of this basis.
  PodBasis truncated(Index l) const;
};

/// psi_k = (1 / sqrt(M lambda_k)) sum_j v_k^j u_j for k <= l, with the sign fixed.
PodBasis assemble_modes(const MatrixX& snapshots, const Eigenpairs<real>& pairs, Index l,
                        const FomOperators& ops, bool centered);

/// Correlation, eigendecomposition and mode assembly in one call.
PodBasis build_pod(const SnapshotSet& snapshots, const FomOperators& ops, Index l, bool centered = false,
                   real drop_tol = 1e-10);

/// a_k = (u - mean, psi_k).
VectorX project(const PodBasis& basis, const SparseMatrix& mass, const VelocityField& u);
MatrixX project_columns(const PodBasis& basis, const SparseMatrix& mass, const MatrixX& u);
/// mean + sum_k a_k psi_k.
VelocityField reconstruct(const PodBasis& basis, const VectorX& a);

/// sum_{k > l} lambda_k.
real truncation_tail(const PodBasis& basis, Index l);

/// (1/M) sum_j ||u_j - P_l u_j||_0^2 with the first l modes (fluctuations when centered).
real mean_projection_error(const MatrixX& snapshots, const PodBasis& basis, const SparseMatrix& mass, Index l);

/// (1/M) sum_j ||grad (u_j - P_l u_j)||_0^2.
real mean_gradient_projection_error(const MatrixX& snapshots, const PodBasis& basis, const FomOperators& ops,
                                    Index l);

struct IdentitySides {
  real lhs;
  real rhs;
};

/// Gradient truncation identity: lhs = mean gradient projection error, rhs =
/// sum_{k > l} lambda_k ||grad psi_k||^2.  Needs a basis holding all d_p modes.
IdentitySides gradient_truncation_identity(const MatrixX& snapshots, const PodBasis& basis,
                                           const FomOperators& ops, Index l);

/// Binary basis file (magic GDPB).
void save_basis(const std::filesystem::path& path, const PodBasis& basis);
PodBasis load_basis(const std::filesystem::path& path, const FomOperators& ops);

}  // namespace gdrom
