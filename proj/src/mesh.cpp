#include "gdrom/mesh.hpp"

#include "gdrom/errors.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gdrom {

namespace {

constexpr std::string_view kMeshMagic = "gdrom-mesh";

real signed_area(const Eigen::Matrix2Xd& v, int a, int b, int c) {
  const Point e1 = v.col(b) - v.col(a);
  const Point e2 = v.col(c) - v.col(a);
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

std::array<int, 2> sorted(int a, int b) { return a < b ? std::array{a, b} : std::array{b, a}; }

}  // namespace

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::inflow: return "inflow";
    case BoundaryTag::outflow: return "outflow";
    case BoundaryTag::wall: return "wall";
    case BoundaryTag::cylinder: return "cylinder";
  }
  return "?";
}

std::optional<BoundaryTag> parse_boundary_tag(std::string_view text) {
  if (text == "inflow") return BoundaryTag::inflow;
  if (text == "outflow") return BoundaryTag::outflow;
  if (text == "wall") return BoundaryTag::wall;
  if (text == "cylinder") return BoundaryTag::cylinder;
  return std::nullopt;
}

Mesh::Mesh(Eigen::Matrix2Xd vertices, Eigen::Matrix3Xi triangles,
           std::vector<BoundaryEdge> boundary)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      boundary_(std::move(boundary)) {
  const Index nv = vertices_.cols();
  if (triangles_.cols() == 0) throw std::invalid_argument("mesh has no triangles");
  std::vector<bool> used(nv, false);
  for (Index t = 0; t < triangles_.cols(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int v = triangles_(k, t);
      if (v < 0 || v >= nv)
        throw GeometryError("triangle " + std::to_string(t) + " references vertex " +
                            std::to_string(v) + " of " + std::to_string(nv));
      used[v] = true;
    }
    if (!(signed_area(vertices_, triangles_(0, t), triangles_(1, t), triangles_(2, t)) > 0.0))
      throw GeometryError("triangle " + std::to_string(t) + " has non-positive signed area");
    for (int k = 0; k < 3; ++k) {
      const real len =
          (vertices_.col(triangles_(k, t)) - vertices_.col(triangles_((k + 1) % 3, t))).norm();
      h_ = std::max(h_, len);
    }
  }

  for (Index v = 0; v < nv; ++v)
    if (!used[v]) throw GeometryError("vertex " + std::to_string(v) + " belongs to no triangle");

  const MeshEdges edges = build_edges(*this);
  std::map<std::array<int, 2>, int> tagged;
  for (const auto& be : boundary_) {
    if (be.vertices[0] < 0 || be.vertices[0] >= nv || be.vertices[1] < 0 || be.vertices[1] >= nv)
      throw GeometryError("boundary edge references a vertex out of range");
    if (++tagged[sorted(be.vertices[0], be.vertices[1])] > 1)
      throw GeometryError("boundary edge " + std::to_string(be.vertices[0]) + "-" +
                          std::to_string(be.vertices[1]) + " tagged more than once");
  }
  std::size_t n_boundary = 0;
  for (std::size_t e = 0; e < edges.edges.size(); ++e) {
    if (edges.adjacent_count[e] != 1) continue;
    ++n_boundary;
    if (!tagged.contains(edges.edges[e]))
      throw GeometryError("boundary edge " + std::to_string(edges.edges[e][0]) + "-" +
                          std::to_string(edges.edges[e][1]) + " carries no tag");
  }
  if (n_boundary != tagged.size())
    throw GeometryError("tagged edge that is not on the boundary");
}

real Mesh::triangle_area(Index t) const {
  return signed_area(vertices_, triangles_(0, t), triangles_(1, t), triangles_(2, t));
}

real Mesh::area() const {
  real sum = 0.0;
  for (Index t = 0; t < n_triangles(); ++t) sum += triangle_area(t);
  return sum;
}

bool Mesh::has_tag(BoundaryTag tag) const {
  return std::any_of(boundary_.begin(), boundary_.end(),
                     [tag](const BoundaryEdge& e) { return e.tag == tag; });
}

MeshEdges build_edges(const Mesh& mesh) {
  MeshEdges out;
  const auto& tri = mesh.triangles();
  out.triangle_edges.resize(3, tri.cols());
  std::map<std::array<int, 2>, int> index;
  for (Index t = 0; t < tri.cols(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const auto key = sorted(tri(k, t), tri((k + 1) % 3, t));
      auto [it, inserted] = index.try_emplace(key, static_cast<int>(out.edges.size()));
      if (inserted) {
        out.edges.push_back(key);
        out.adjacent_count.push_back(0);
      }
      ++out.adjacent_count[it->second];
      out.triangle_edges(k, t) = it->second;
    }
  }
  return out;
}

Mesh generate_rect_mesh(int nx, int ny, const Rectangle& domain) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("generate_rect_mesh: cell counts must be >= 1");
  const Point extent = domain.upper - domain.lower;
  if (!(extent.x() > 0.0) || !(extent.y() > 0.0))
    throw std::invalid_argument("generate_rect_mesh: side lengths must be positive");

  Eigen::Matrix2Xd v(2, (nx + 1) * (ny + 1));
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      v.col(id(i, j)) = domain.lower + Point(extent.x() * i / nx, extent.y() * j / ny);

  Eigen::Matrix3Xi t(3, 2 * nx * ny);
  Index k = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      t.col(k++) << a, b, c;
      t.col(k++) << a, c, d;
    }
  }

  std::vector<BoundaryEdge> boundary;
  for (int i = 0; i < nx; ++i) {
    boundary.push_back({{id(i, 0), id(i + 1, 0)}, BoundaryTag::wall});
    boundary.push_back({{id(i, ny), id(i + 1, ny)}, BoundaryTag::wall});
  }
  for (int j = 0; j < ny; ++j) {
    boundary.push_back({{id(0, j), id(0, j + 1)}, BoundaryTag::wall});
    boundary.push_back({{id(nx, j), id(nx, j + 1)}, BoundaryTag::wall});
  }
  return Mesh(std::move(v), std::move(t), std::move(boundary));
}

Mesh parse_mesh(std::istream& in) {
  long line_no = 0;
  std::string line;
  auto next = [&](const char* what) -> std::istringstream {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(line);
    }
    throw ParseError(line_no + 1, std::string("unexpected end of file, expected ") + what);
  };
  auto expect_end = [&](std::istringstream& s) {
    std::string rest;
    if (s >> rest) throw ParseError(line_no, "trailing token '" + rest + "'");
  };

  {
    auto s = next("header");
    std::string magic;
    int version = 0;
    if (!(s >> magic >> version) || magic != kMeshMagic || version != 1)
      throw ParseError(line_no, "malformed header, expected 'gdrom-mesh 1'");
    expect_end(s);
  }
  long nv = -1, nt = -1, nb = -1;
  {
    auto s = next("counts");
    if (!(s >> nv >> nt >> nb) || nv < 0 || nt < 1 || nb < 0)
      throw ParseError(line_no, "malformed counts line");
    expect_end(s);
  }
  Eigen::Matrix2Xd v(2, nv);
  for (long i = 0; i < nv; ++i) {
    auto s = next("vertex");
    if (!(s >> v(0, i) >> v(1, i))) throw ParseError(line_no, "malformed vertex line");
    expect_end(s);
  }
  Eigen::Matrix3Xi t(3, nt);
  for (long i = 0; i < nt; ++i) {
    auto s = next("triangle");
    long a, b, c;
    if (!(s >> a >> b >> c)) throw ParseError(line_no, "malformed triangle line");
    expect_end(s);
    for (long idx : {a, b, c})
      if (idx < 0 || idx >= nv)
        throw ParseError(line_no, "vertex index " + std::to_string(idx) + " out of range (" +
                                      std::to_string(nv) + " vertices)");
    t.col(i) << static_cast<int>(a), static_cast<int>(b), static_cast<int>(c);
    if (!(signed_area(v, t(0, i), t(1, i), t(2, i)) > 0.0))
      throw ParseError(line_no, "degenerate or clockwise triangle");
  }
  std::vector<BoundaryEdge> boundary;
  boundary.reserve(nb);
  for (long i = 0; i < nb; ++i) {
    auto s = next("boundary edge");
    long a, b;
    std::string tag;
    if (!(s >> a >> b >> tag)) throw ParseError(line_no, "malformed boundary line");
    expect_end(s);
    if (a < 0 || a >= nv || b < 0 || b >= nv)
      throw ParseError(line_no, "boundary vertex index out of range");
    auto parsed = parse_boundary_tag(tag);
    if (!parsed) throw ParseError(line_no, "unknown boundary tag '" + tag + "'");
    boundary.push_back({{static_cast<int>(a), static_cast<int>(b)}, *parsed});
  }
  try {
    return Mesh(std::move(v), std::move(t), std::move(boundary));
  } catch (const GeometryError& e) {
    throw ParseError(line_no, e.what());
  }
}

Mesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file " + path.string());
  return parse_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << kMeshMagic << " 1\n"
      << mesh.n_vertices() << ' ' << mesh.n_triangles() << ' ' << mesh.boundary().size() << '\n';
  for (Index i = 0; i < mesh.n_vertices(); ++i)
    out << format_real(mesh.vertices()(0, i)) << ' ' << format_real(mesh.vertices()(1, i)) << '\n';
  for (Index i = 0; i < mesh.n_triangles(); ++i)
    out << mesh.triangles()(0, i) << ' ' << mesh.triangles()(1, i) << ' '
        << mesh.triangles()(2, i) << '\n';
  for (const auto& e : mesh.boundary())
    out << e.vertices[0] << ' ' << e.vertices[1] << ' ' << to_string(e.tag) << '\n';
}

void save_mesh(const std::filesystem::path& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh file " + path.string());
  write_mesh(out, mesh);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace gdrom
