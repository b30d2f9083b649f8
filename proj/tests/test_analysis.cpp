#include "doctest.h"

#include "gdrom/analysis.hpp"
#include "gdrom/csv.hpp"
#include "gdrom/errors.hpp"
#include "gdrom/projection.hpp"

#include "test_meshes.hpp"
#include "test_util.hpp"

#include <filesystem>
#include <numbers>

using namespace gdrom;
using namespace gdrom::testing;

TEST_CASE("kinetic energy") {
  const FemSpaces spaces(generate_rect_mesh(3, 3));
  const FomOperators ops = assemble_operators(spaces);
  CHECK(kinetic_energy(ops.mass, VectorX::Zero(spaces.n_velocity())) == 0.0);
  std::mt19937_64 rng(1);
  const VectorX u = random_vector(rng, spaces.n_velocity());
  double oracle = 0.0;
  for (Index t = 0; t < spaces.mesh().n_triangles(); ++t)
    for (int q = 0; q < QuadratureRule::size; ++q)
      oracle += 0.5 * spaces.quadrature(t)[q].weight * spaces.value_at(u, t, q).squaredNorm();
  CHECK(kinetic_energy(ops.mass, u) == doctest::Approx(oracle).epsilon(1e-12));

  SnapshotSet snaps{MatrixX(u.size(), 3), 0.1, 0.0};
  for (Index j = 0; j < 3; ++j) snaps.data.col(j) = random_vector(rng, u.size());
  const PodBasis basis = build_pod(snaps, ops, 2);
  CHECK(kinetic_energy(ops.mass, basis.modes.col(0)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("Stokes-projected drag and lift test functions") {
  const FemSpaces spaces(channel_with_block(12, 6, 2.2, 0.41, 4, 6, 1));
  const FomOperators ops = assemble_operators(spaces);
  const DragLiftTestFunctions tf = stokes_test_functions(spaces, ops);
  const Index ns = spaces.n_scalar();
  for (Index s = 0; s < ns; ++s) {
    const auto& tag = spaces.dof_tag(s);
    if (tag == BoundaryTag::cylinder) {
      CHECK(tf.drag[s] == 1.0);
      CHECK(tf.drag[ns + s] == 0.0);
      CHECK(tf.lift[s] == 0.0);
      CHECK(tf.lift[ns + s] == 1.0);
    } else if (tag) {
      CHECK(tf.drag[s] == 0.0);
      CHECK(tf.lift[ns + s] == 0.0);
    }
  }
  CHECK((ops.divergence * tf.drag).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((ops.divergence * tf.lift).cwiseAbs().maxCoeff() <= 1e-10);
  const StokesProjector proj(spaces, ops);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 10; ++k) {
    const VectorX phi = proj.project(random_interior_field(rng, spaces));
    CHECK(std::abs(phi.dot(ops.stiffness * tf.drag)) <= 1e-10);
  }
  const FemSpaces plain(generate_rect_mesh(2, 2));
  CHECK_THROWS_AS(stokes_test_functions(plain, assemble_operators(plain)), std::invalid_argument);
}

TEST_CASE("drag and lift coefficients") {
  const FemSpaces spaces(channel_with_block(16, 8, 2.2, 0.41, 5, 7, 1));
  const FomOperators ops = assemble_operators(spaces);
  const DragLiftTestFunctions tf = stokes_test_functions(spaces, ops);
  const DragLiftEvaluator eval(spaces, ops, tf);
  const VectorX zero = VectorX::Zero(spaces.n_velocity());
  const DragLift none = eval(zero, zero, 0.01, 1e-3);
  CHECK(none.drag == 0.0);
  CHECK(none.lift == 0.0);
  CHECK_THROWS_AS(eval(zero, VectorX(), 0.01, 1e-3), std::invalid_argument);

  // Steady symmetric Stokes flow has no lift.
  FomConfig cfg;
  cfg.nu = 1e-3;
  cfg.dt = 0.5;
  cfg.t_end = 20.0;
  cfg.convection = 0.0;
  cfg.boundary = parabolic_inflow(0.3, 0.41);
  const FomRun run = run_fom(spaces, ops, cfg);
  CHECK(std::abs(run.qoi.c_l.back()) <= 1e-6);
  CHECK(run.qoi.c_d.back() > 0.0);

  // Homogeneity in the test function.
  std::mt19937_64 rng(3);
  const VectorX u = random_vector(rng, spaces.n_velocity()), up = random_vector(rng, spaces.n_velocity());
  const DragLiftEvaluator doubled(spaces, ops, {2.0 * tf.drag, 2.0 * tf.lift});
  CHECK(doubled(u, up, 0.01, 1e-3).drag == doctest::Approx(2.0 * eval(u, up, 0.01, 1e-3).drag).epsilon(1e-12));
}

TEST_CASE("Strouhal number") {
  const double dt = 1e-3;
  std::vector<double> lift;
  for (int n = 0; n < 2000; ++n) lift.push_back(0.8 * std::sin(2 * std::numbers::pi * 3.03 * n * dt) + 0.1);
  const double st = strouhal(lift, dt, 0.1, 1.0);
  CHECK(st == doctest::Approx(0.303).epsilon(0.002 / 0.303));
  std::vector<double> scaled;
  for (double v : lift) scaled.push_back(5.0 * v);
  CHECK(strouhal(scaled, dt, 0.1, 1.0) == doctest::Approx(st).epsilon(1e-12));
  std::vector<double> short_series(lift.begin(), lift.begin() + 200);
  CHECK_THROWS_AS(strouhal(short_series, dt, 0.1, 1.0), InsufficientData);
}

TEST_CASE("decay fit") {
  std::vector<double> e;
  for (int n = 0; n < 100; ++n) e.push_back(std::pow(0.5, n));
  DecayFit fit = fit_decay(e);
  REQUIRE(fit.valid);
  CHECK(fit.ratio == doctest::Approx(0.5).epsilon(1e-6));

  for (auto& v : e) v += 1e-8;
  fit = fit_decay(e);
  CHECK(fit.floor == doctest::Approx(1e-8).epsilon(1e-6));
  CHECK(fit.ratio < 0.6);
  CHECK(fit.last < 30);
  CHECK(e[fit.last + 1] < 3e-8);

  CHECK_FALSE(fit_decay(std::vector<double>(10, 0.0)).valid);
  CHECK_FALSE(fit_decay(std::vector<double>{1.0}).valid);
}

TEST_CASE("error report") {
  const FemSpaces spaces(generate_rect_mesh(3, 3));
  const FomOperators ops = assemble_operators(spaces);
  std::mt19937_64 rng(4);
  SnapshotSet ref{MatrixX(spaces.n_velocity(), 20), 0.01, 1.0};
  for (Index j = 0; j < 20; ++j) ref.data.col(j) = random_vector(rng, spaces.n_velocity());
  const PodBasis basis = build_pod(ref, ops, 4);

  RomTrajectory exact;
  exact.a = project_columns(basis, ops.mass, ref.data);
  exact.t = ref.times();
  const ErrorReport zero = error_report(exact, ref, basis, ops.mass);
  CHECK(zero.t.size() == 20);
  for (std::size_t i = 0; i < zero.t.size(); ++i) {
    CHECK(zero.projection_error[i] <= 1e-12);
    CHECK(zero.error[i] == doctest::Approx(zero.best[i]).epsilon(1e-10));
  }
  CHECK_FALSE(zero.decay.valid);

  RomTrajectory noisy = exact;
  noisy.a += MatrixX::NullaryExpr(4, 20, [&] { return std::normal_distribution<double>()(rng); });
  const ErrorReport r = error_report(noisy, ref, basis, ops.mass);
  double ms = 0.0;
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    CHECK(r.projection_error[i] <= r.error[i] + r.best[i] + 1e-12);
    ms += r.error[i] * r.error[i] / 20.0;
  }
  CHECK(r.mean_square == doctest::Approx(ms).epsilon(1e-12));
  CHECK(r.l2l2 == doctest::Approx(std::sqrt(ms)).epsilon(1e-12));

  // Window option drops early levels from the aggregates only.
  const ErrorReport late = error_report(noisy, ref, basis, ops.mass, {1.1});
  CHECK(late.t.size() == 20);
  double ms_late = 0.0;
  for (std::size_t i = 10; i < 20; ++i) ms_late += r.error[i] * r.error[i] / 10.0;
  CHECK(late.mean_square == doctest::Approx(ms_late).epsilon(1e-12));

  RomTrajectory elsewhere = exact;
  for (auto& t : elsewhere.t) t += 10.0;
  CHECK_THROWS_AS(error_report(elsewhere, ref, basis, ops.mass), std::invalid_argument);
}

TEST_CASE("QoI maxima deviations") {
  QoISeries a, b;
  for (int n = 0; n < 10; ++n) {
    a.push(n * 0.1, n, 2.0 * n, -n);
    b.push(n * 0.1, n + 0.5, 2.0 * n - 1.0, 1.0);
  }
  const QoIDeviation d = max_deviation(a, b, 0.0);
  CHECK(d.e_kin == doctest::Approx(0.5));
  CHECK(d.c_d == doctest::Approx(1.0));
  CHECK(d.c_l == doctest::Approx(1.0));
  CHECK_THROWS_AS(max_deviation(a, b, 5.0), std::invalid_argument);
}

TEST_CASE("CSV artifacts round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "gdrom_test_analysis";
  std::filesystem::create_directories(dir);
  RomTrajectory traj;
  traj.t = {0.0, 0.1, 0.2};
  traj.a = MatrixX::Random(3, 3);
  traj.a(0, 0) = 1.0 / 3.0;
  write_trajectory_csv(dir / "traj.csv", traj);
  const RomTrajectory back = read_trajectory_csv(dir / "traj.csv");
  CHECK(back.a == traj.a);
  CHECK(back.t == traj.t);

  QoISeries q;
  q.push(0.1, 0.5, 3.2, -0.9);
  q.push(0.2, 0.25, 3.1, 0.8);
  write_qoi_csv(dir / "qoi.csv", q);
  const QoISeries qb = read_qoi_csv(dir / "qoi.csv");
  CHECK(qb.c_l == q.c_l);
  std::ifstream in(dir / "qoi.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,e_kin,c_d,c_l");

  ErrorReport r;
  r.l2l2 = 0.125;
  write_report_csv(dir / "report.csv", r);
  const CsvTable table = read_csv(dir / "report.csv");
  CHECK(table.header == std::vector<std::string>{"metric", "value"});
  std::filesystem::remove_all(dir);

  const std::string text = format_report_table({{"g-rom", r}});
  CHECK(text.find("g-rom") != std::string::npos);
  CHECK(text.find("1.2500e-01") != std::string::npos);
}
