#include "doctest.h"

#include "gdrom/errors.hpp"
#include "gdrom/fem_spaces.hpp"
#include "gdrom/mesh.hpp"

#include <sstream>

using namespace gdrom;

TEST_CASE("rect mesh counts") {
  const Mesh one = generate_rect_mesh(1, 1);
  CHECK(one.n_triangles() == 2);
  CHECK(one.n_vertices() == 4);

  const Mesh two = generate_rect_mesh(2, 2);
  CHECK(two.n_triangles() == 8);
  CHECK(two.n_vertices() == 9);
  // E = V + T - 1 for a simply connected triangulation.
  CHECK(build_edges(two).edges.size() == 16);

  const FemSpaces spaces(two);
  CHECK(spaces.n_scalar() == 25);
  CHECK(spaces.n_velocity() == 50);
  CHECK(spaces.n_pressure() == 9);
}

TEST_CASE("rect mesh invariants") {
  const Mesh m = generate_rect_mesh(3, 2, {{0.0, 0.0}, {3.0, 1.0}});
  for (Index t = 0; t < m.n_triangles(); ++t) CHECK(m.triangle_area(t) > 0.0);
  CHECK(m.area() == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(m.h() == doctest::Approx(std::sqrt(1.25)).epsilon(1e-14));
  for (const auto& e : m.boundary()) CHECK(e.tag == BoundaryTag::wall);
  CHECK(m.boundary().size() == 10);
  // Diagonal runs lower-left to upper-right.
  CHECK(m.triangles().col(0) == Eigen::Vector3i(0, 1, 5));
}

TEST_CASE("rect mesh rejects bad arguments") {
  CHECK_THROWS_AS(generate_rect_mesh(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_rect_mesh(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_rect_mesh(1, 1, {{0, 0}, {0, 1}}), std::invalid_argument);
}

TEST_CASE("parse single triangle") {
  std::istringstream in(
      "gdrom-mesh 1\n3 1 3\n0 0\n1 0\n0 1\n0 1 2\n0 1 wall\n1 2 outflow\n2 0 inflow\n");
  const Mesh m = parse_mesh(in);
  CHECK(m.n_triangles() == 1);
  CHECK(m.has_tag(BoundaryTag::outflow));
  CHECK_FALSE(m.has_tag(BoundaryTag::cylinder));
}

TEST_CASE("parse errors carry line numbers") {
  auto line_of = [](const std::string& text) -> long {
    std::istringstream in(text);
    try {
      parse_mesh(in);
    } catch (const ParseError& e) {
      return e.line;
    }
    return -1;
  };
  CHECK(line_of("gdrom-mesh 1\n3 1 3\n0 0\n1 0\n0 1\n0 1 99\n0 1 wall\n1 2 wall\n2 0 wall\n") == 6);
  CHECK(line_of("gdrom-mesh 2\n") == 1);
  CHECK(line_of("not-a-mesh 1\n") == 1);
  CHECK(line_of("gdrom-mesh 1\n3 1 3\n0 0\n1 0\n2 0\n0 1 2\n0 1 wall\n1 2 wall\n2 0 wall\n") == 6);
  CHECK(line_of("gdrom-mesh 1\n3 1 3\n0 0\n1 0\n0 1\n0 1 2\n0 1 wall\n1 2 wall\n2 0 lid\n") == 9);
  CHECK(line_of("gdrom-mesh 1\n3 1 2\n0 0\n1 0\n0 1\n0 1 2\n0 1 wall\n1 2 wall\n") > 0);  // untagged edge
  CHECK(line_of("gdrom-mesh 1\n3 1\n") == 2);
}

TEST_CASE("save/load round trip is bit exact") {
  Mesh m = generate_rect_mesh(3, 4, {{0.1, -0.3}, {2.2, 0.41}});
  std::stringstream buffer;
  write_mesh(buffer, m);
  const Mesh back = parse_mesh(buffer);
  CHECK(back.vertices() == m.vertices());
  CHECK(back.triangles() == m.triangles());
  REQUIRE(back.boundary().size() == m.boundary().size());
  for (std::size_t i = 0; i < m.boundary().size(); ++i) {
    CHECK(back.boundary()[i].vertices == m.boundary()[i].vertices);
    CHECK(back.boundary()[i].tag == m.boundary()[i].tag);
  }
}

TEST_CASE("point locator") {
  const Mesh m = generate_rect_mesh(4, 4);
  const PointLocator loc(m);
  for (double x : {0.0, 0.13, 0.5, 0.99, 1.0})
    for (double y : {0.0, 0.27, 0.75, 1.0}) {
      auto hit = loc.locate({x, y});
      REQUIRE(hit);
      CHECK(hit->barycentric.minCoeff() >= -1e-12);
      Point back = Point::Zero();
      for (int k = 0; k < 3; ++k) back += hit->barycentric[k] * m.vertex(m.triangles()(k, hit->triangle));
      CHECK((back - Point(x, y)).norm() < 1e-14);
    }
  CHECK_FALSE(loc.locate({1.5, 0.5}));
}

TEST_CASE("mesh invariants are enforced") {
  Eigen::Matrix2Xd v(2, 4);
  v << 0, 1, 0, 5, 0, 0, 1, 5;
  Eigen::Matrix3Xi t(3, 1);
  t << 0, 1, 2;
  const std::vector<BoundaryEdge> tags{{{0, 1}, BoundaryTag::wall}, {{1, 2}, BoundaryTag::wall},
                                       {{2, 0}, BoundaryTag::wall}};
  CHECK_THROWS_AS(Mesh(v, t, tags), GeometryError);  // vertex 3 unused
  const Eigen::Matrix2Xd three = v.leftCols(3);
  CHECK_NOTHROW(Mesh(three, t, tags));
  CHECK_THROWS_AS(Mesh(three, t, {tags[0], tags[1]}), GeometryError);
  CHECK_THROWS_AS(Mesh(three, t, {tags[0], tags[1], tags[2], tags[2]}), GeometryError);
  Eigen::Matrix3Xi flipped(3, 1);
  flipped << 0, 2, 1;
  CHECK_THROWS_AS(Mesh(three, flipped, tags), GeometryError);
}
