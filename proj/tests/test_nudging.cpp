#include "doctest.h"

#include "gdrom/errors.hpp"
#include "gdrom/nudging.hpp"

#include "manufactured.hpp"
#include "test_util.hpp"

using namespace gdrom;
using namespace gdrom::testing;

namespace {

const InterpKind kKinds[] = {InterpKind::nodal, InterpKind::piecewise_constant};

// ||f - g||_0 by fine-mesh quadrature of pointwise fields.
double quadrature_distance(const FemSpaces& spaces, const std::function<Eigen::Vector2d(const Point&)>& f,
                           const std::function<Eigen::Vector2d(const Point&)>& g) {
  double sum = 0.0;
  for (Index t = 0; t < spaces.mesh().n_triangles(); ++t)
    for (const auto& qp : spaces.quadrature(t)) sum += qp.weight * (f(qp.x) - g(qp.x)).squaredNorm();
  return std::sqrt(sum);
}

// (I_H u, I_H v) integrated cell by cell on the coarse mesh.
double coarse_inner(const CoarseInterp& interp, const VectorX& cu, const VectorX& cv) {
  const Mesh& coarse = *interp.coarse_mesh();
  const auto& rule = dunavant7();
  double sum = 0.0;
  for (Index t = 0; t < coarse.n_triangles(); ++t) {
    const auto tri = coarse.triangles().col(t);
    const Point a = coarse.vertex(tri[0]), b = coarse.vertex(tri[1]), c = coarse.vertex(tri[2]);
    for (int q = 0; q < QuadratureRule::size; ++q) {
      const Point& r = rule.points[q];
      const Point x = a + r.x() * (b - a) + r.y() * (c - a);
      sum += 2.0 * coarse.triangle_area(t) * rule.weights[q] * interp.evaluate(cu, x).dot(interp.evaluate(cv, x));
    }
  }
  return sum;
}

}  // namespace

TEST_CASE("interpolation kinds parse") {
  CHECK(parse_interp_kind("nodal") == InterpKind::nodal);
  CHECK(parse_interp_kind("pc") == InterpKind::piecewise_constant);
  CHECK(to_string(InterpKind::piecewise_constant) == "pc");
  CHECK_THROWS_AS(parse_interp_kind("spline"), std::invalid_argument);
}

TEST_CASE("constants are reproduced and the interpolant is idempotent") {
  const FemSpaces fine(generate_rect_mesh(8, 8));
  std::mt19937_64 rng(1);
  for (InterpKind kind : kKinds) {
    CAPTURE(to_string(kind));
    const CoarseInterp interp = build_coarse_interp(fine, generate_rect_mesh(2, 2), kind);
    const VectorX c = interp.apply(fine.interpolate([](const Point&) { return Eigen::Vector2d(2.5, -1.0); }));
    const Index half = interp.n_coarse() / 2;
    CHECK((c.head(half).array() - 2.5).abs().maxCoeff() <= 1e-13);
    CHECK((c.tail(half).array() + 1.0).abs().maxCoeff() <= 1e-13);

    const VectorX u = random_vector(rng, fine.n_velocity());
    const VectorX cu = interp.apply(u);
    const VectorX again = interp.apply([&](const Point& x) { return interp.evaluate(cu, x); });
    CHECK((again - cu).cwiseAbs().maxCoeff() <= 1e-12);

    const VectorX v = random_vector(rng, fine.n_velocity());
    CHECK((interp.apply(VectorX(3.0 * u - v)) - (3.0 * cu - interp.apply(v))).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("nodal interpolant reproduces linears and coarse P1 fields") {
  const FemSpaces fine(generate_rect_mesh(8, 8));
  const CoarseInterp interp = build_coarse_interp(fine, generate_rect_mesh(4, 4), InterpKind::nodal);
  const Mesh& coarse = *interp.coarse_mesh();
  const VectorX c = interp.apply(fine.interpolate([](const Point& x) { return Eigen::Vector2d(x.x(), x.y()); }));
  const Index nc = coarse.n_vertices();
  for (Index i = 0; i < nc; ++i) {
    CHECK(std::abs(c[i] - coarse.vertex(i).x()) <= 1e-14);
    CHECK(std::abs(c[nc + i] - coarse.vertex(i).y()) <= 1e-14);
  }
  // On nested meshes a coarse P1 field lies in the fine P2 space.
  std::mt19937_64 rng(2);
  const VectorX cr = random_vector(rng, interp.n_coarse());
  const VectorX prolonged = fine.interpolate([&](const Point& x) { return interp.evaluate(cr, x); });
  CHECK((interp.apply(prolonged) - cr).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("Gram and mixed Gram against pointwise quadrature") {
  const FemSpaces fine(generate_rect_mesh(8, 8));
  const FomOperators ops = assemble_operators(fine);
  std::mt19937_64 rng(3);
  for (InterpKind kind : kKinds) {
    CAPTURE(to_string(kind));
    const CoarseInterp interp = build_coarse_interp(fine, generate_rect_mesh(4, 4), kind);
    const VectorX u = random_vector(rng, fine.n_velocity());
    const VectorX cu = interp.apply(u);
    const PointLocator locator(fine.mesh());
    auto field = [&](const Point& x) {
      const auto hit = locator.locate(x);
      return fine.evaluate(u, hit->triangle, hit->barycentric.tail<2>());
    };
    const double oracle = quadrature_distance(fine, field, [&](const Point& x) { return interp.evaluate(cu, x); });
    CHECK(interp.distance(u, ops.mass) == doctest::Approx(oracle).epsilon(1e-10));
    CHECK(interp.norm(cu) == doctest::Approx(std::sqrt(coarse_inner(interp, cu, cu))).epsilon(1e-12));
  }
}

TEST_CASE("approximation order in H") {
  const FemSpaces fine(generate_rect_mesh(32, 32));
  const FomOperators ops = assemble_operators(fine);
  const VectorX u = fine.interpolate(curl_field);
  for (InterpKind kind : kKinds) {
    std::vector<double> hs, ratios;
    for (int n : {4, 8, 16}) {
      const CoarseInterp interp = build_coarse_interp(fine, generate_rect_mesh(n, n), kind);
      hs.push_back(interp.resolution());
      ratios.push_back(interp.distance(u, ops.mass) / h1_seminorm(ops, u));
    }
    MESSAGE(to_string(kind), " order ", observed_order(hs, ratios));
    CHECK(observed_order(hs, ratios) >= 0.9);
  }
}

TEST_CASE("interpolation constants") {
  const FemSpaces fine(generate_rect_mesh(8, 8));
  const FomOperators ops = assemble_operators(fine);
  const std::vector<VelocityField> constants{
      fine.interpolate([](const Point&) { return Eigen::Vector2d(1.0, 2.0); }),
      fine.interpolate([](const Point&) { return Eigen::Vector2d(0.0, -3.0); }), VectorX::Zero(fine.n_velocity())};
  for (InterpKind kind : kKinds) {
    const CoarseInterp interp = build_coarse_interp(fine, generate_rect_mesh(2, 2), kind);
    const InterpConstants c = estimate_constants(interp, ops, constants);
    CHECK(c.c0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.ci == 0.0);
  }

  std::mt19937_64 rng(4);
  std::vector<VelocityField> probes = standard_probes(fine);
  CHECK(probes.size() >= 20);
  for (int k = 0; k < 10; ++k) probes.push_back(random_vector(rng, fine.n_velocity()));
  const CoarseInterp pc = build_coarse_interp(fine, generate_rect_mesh(4, 4), InterpKind::piecewise_constant);
  CHECK(estimate_constants(pc, ops, probes).c0 <= 1.0 + 1e-12);
}

TEST_CASE("interpolation constants are stable under fine-mesh refinement") {
  for (InterpKind kind : kKinds) {
    std::vector<InterpConstants> found;
    for (int nx : {8, 16, 32}) {
      const FemSpaces fine(generate_rect_mesh(nx, nx));
      const FomOperators ops = assemble_operators(fine);
      const CoarseInterp interp = build_coarse_interp(fine, generate_rect_mesh(4, 4), kind);
      found.push_back(estimate_constants(interp, ops, standard_probes(fine)));
    }
    for (std::size_t i = 1; i < found.size(); ++i) {
      CHECK(found[i].c0 == doctest::Approx(found[0].c0).epsilon(0.1));
      CHECK(found[i].ci == doctest::Approx(found[0].ci).epsilon(0.1));
    }
  }
}

TEST_CASE("coarse meshes must cover the fine domain") {
  const FemSpaces fine(generate_rect_mesh(4, 4));
  CHECK_THROWS_AS(build_coarse_interp(fine, generate_rect_mesh(2, 2, {{0.0, 0.0}, {2.0, 1.0}}), InterpKind::nodal),
                  GeometryError);
  CHECK_THROWS_AS(
      build_coarse_interp(fine, generate_rect_mesh(2, 2, {{0.0, 0.0}, {0.5, 1.0}}), InterpKind::piecewise_constant),
      GeometryError);
}

TEST_CASE("reduced nudging algebra") {
  const FemSpaces fine(generate_rect_mesh(8, 8));
  const FomOperators ops = assemble_operators(fine);
  std::mt19937_64 rng(5);
  SnapshotSet obs;
  obs.data.resize(fine.n_velocity(), 12);
  for (Index j = 0; j < 12; ++j) obs.data.col(j) = random_vector(rng, fine.n_velocity());
  obs.dt = 0.01;
  obs.t_first = 1.0;
  const PodBasis basis = build_pod(obs, ops, 5);

  const NudgingAlgebra id = build_nudging_algebra(basis, identity_interp(fine, ops), obs);
  CHECK((id.gram - MatrixX::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-10);

  for (InterpKind kind : kKinds) {
    CAPTURE(to_string(kind));
    const CoarseInterp interp = build_coarse_interp(fine, generate_rect_mesh(2, 2), kind);
    const NudgingAlgebra alg = build_nudging_algebra(basis, interp, obs);
    Eigen::SelfAdjointEigenSolver<MatrixX> es(alg.gram);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    CHECK((alg.gram - alg.gram.transpose()).cwiseAbs().maxCoeff() == 0.0);

    std::uniform_real_distribution<double> when(obs.t_first, obs.t_first + 0.11);
    for (int trial = 0; trial < 5; ++trial) {
      const double t = when(rng);
      const Index j = alg.observation_index(t);
      CHECK(std::abs(obs.time(j) - t) <= 0.5 * obs.dt + 1e-12);
      const VectorX d = alg.data_at(t);
      const VectorX cu = interp.apply(VectorX(obs.data.col(j)));
      for (Index k = 0; k < 5; ++k) {
        const double oracle = coarse_inner(interp, cu, interp.apply(VectorX(basis.modes.col(k))));
        CHECK(std::abs(d[k] - oracle) <= 1e-12 * std::max(1.0, std::abs(oracle)));
      }
      CHECK(alg.data_at(t + alg.period()) == d);
      CHECK(alg.data_at(t - 3 * alg.period()) == d);
    }
  }

  const SnapshotSet empty{MatrixX(fine.n_velocity(), 0), 0.01, 0.0};
  CHECK_THROWS_AS(build_nudging_algebra(basis, identity_interp(fine, ops), empty, 10.0), std::invalid_argument);
  CHECK_NOTHROW(build_nudging_algebra(basis, identity_interp(fine, ops), empty, 0.0));
}
