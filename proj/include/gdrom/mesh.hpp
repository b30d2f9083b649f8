#pragma once

#include "gdrom/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace gdrom {

enum class BoundaryTag : std::uint8_t { inflow, outflow, wall, cylinder };

std::string_view to_string(BoundaryTag tag);
std::optional<BoundaryTag> parse_boundary_tag(std::string_view text);

struct BoundaryEdge {
  std::array<int, 2> vertices;
  BoundaryTag tag;
};

struct Rectangle {
  Point lower{0.0, 0.0};
  Point upper{1.0, 1.0};
};

/// Conforming triangulation of a polygonal domain in the plane.
///
/// Construction validates the invariants: positively oriented, non-degenerate
/// triangles, and a one-to-one correspondence between topological boundary
/// edges and tagged boundary entries.
class Mesh {
 public:
  Mesh(Eigen::Matrix2Xd vertices, Eigen::Matrix3Xi triangles,
       std::vector<BoundaryEdge> boundary);

  const Eigen::Matrix2Xd& vertices() const { return vertices_; }
  const Eigen::Matrix3Xi& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary() const { return boundary_; }

  Index n_vertices() const { return vertices_.cols(); }
  Index n_triangles() const { return triangles_.cols(); }

  Point vertex(Index i) const { return vertices_.col(i); }

  /// Maximum element diameter (longest edge over all triangles).
  real h() const { return h_; }
  real area() const;
  real triangle_area(Index t) const;

  bool has_tag(BoundaryTag tag) const;

 private:
  Eigen::Matrix2Xd vertices_;
  Eigen::Matrix3Xi triangles_;
  std::vector<BoundaryEdge> boundary_;
  real h_ = 0.0;
};

/// Unique undirected edges plus the triangle -> edge incidence.  Local edge k
/// of a triangle joins local vertices k and (k + 1) % 3.
struct MeshEdges {
  std::vector<std::array<int, 2>> edges;
  Eigen::Matrix3Xi triangle_edges;
  std::vector<int> adjacent_count;
};

MeshEdges build_edges(const Mesh& mesh);

/// Structured mesh of nx * ny cells, each split along its lower-left to
/// upper-right diagonal.  All boundary edges are tagged wall.
Mesh generate_rect_mesh(int nx, int ny, const Rectangle& domain = {});

Mesh parse_mesh(std::istream& in);
Mesh load_mesh(const std::filesystem::path& path);
void write_mesh(std::ostream& out, const Mesh& mesh);
void save_mesh(const std::filesystem::path& path, const Mesh& mesh);

}  // namespace gdrom
