#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <charconv>
#include <string>

namespace gdrom {

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
using SpMat = Eigen::SparseMatrix<Scalar>;

using real = double;
using Index = Eigen::Index;

using VectorX = Vec<real>;
using MatrixX = Mat<real>;
using SparseMatrix = SpMat<real>;
using Triplet = Eigen::Triplet<real>;

using Point = Eigen::Vector2d;

// Coefficient vectors over the P2 velocity dofs (component-blocked: all x
// components, then all y components) and the P1 pressure dofs.
using VelocityField = VectorX;
using PressureField = VectorX;

/// Shortest text form that parses back to the identical double, capped at
/// 17 significant digits.
inline std::string format_real(real value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                 std::chars_format::general, 17);
  return std::string(buffer, end);
}

}  // namespace gdrom
