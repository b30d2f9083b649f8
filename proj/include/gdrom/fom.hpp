#pragma once

#include "gdrom/operators.hpp"
#include "gdrom/qoi.hpp"
#include "gdrom/snapshots.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace gdrom {

/// Body force as a sum of separable terms amplitude(t) * shape(x); the shape
/// load vectors are assembled once.
struct Forcing {
  struct Term {
    std::function<real(real)> amplitude;
    std::function<Eigen::Vector2d(const Point&)> shape;
  };
  std::vector<Term> terms;
};

/// Dirichlet data by boundary tag, position and time.  Never evaluated on
/// outflow dofs (do-nothing condition).
using BoundaryData = std::function<Eigen::Vector2d(BoundaryTag, const Point&, real)>;

/// Two counter-rotating forcing patterns on the unit square, driven a quarter
/// period apart: amplitude * (cos(w t) curl s1 + sin(w t) curl s2) with
/// s1 = sin^2(pi x) sin^2(pi y), s2 = sin(2 pi x) sin^2(pi y), w = 2 pi / period.
Forcing rotating_gyres(real amplitude, real period);

BoundaryData no_slip();

/// (4 U_m y (A - y) / A^2, 0) on inflow edges, zero on walls and cylinder.
BoundaryData parabolic_inflow(real u_max, real height);

enum class FomScheme { bdf2_semi_implicit, implicit_euler };

struct FomConfig {
  real nu = 1e-3;
  real dt = 2e-3;
  real t0 = 0.0;
  real t_end = 1.0;
  real u_max = 1.5;
  real height = 0.41;
  Forcing forcing;
  BoundaryData boundary = no_slip();
  /// Snapshots are step-end states with snap_start <= t < snap_end, every
  /// stride-th step inside the window.
  real snap_start = 0.0;
  real snap_end = 0.0;
  int stride = 1;
  FomScheme scheme = FomScheme::bdf2_semi_implicit;
  /// Multiplies the convection term; 0 gives the Stokes regime.
  real convection = 1.0;
  int max_iterations = 50;
  real tolerance = 1e-10;
  DragLiftScales scales;

  void validate() const;
};

struct FomState {
  VelocityField u;
  VelocityField u_prev;
  PressureField p;
  long step = 0;
  real time = 0.0;
  /// Size of the step that produced u; 0 when u has no history, in which
  /// case the next BDF2 step is a semi-implicit Euler step of (2/3) dt.
  real dt_prev = 0.0;
};

/// Time stepper for the Taylor-Hood Navier-Stokes discretization.
class FomSolver {
 public:
  FomSolver(const FemSpaces& spaces, const FomOperators& ops, FomConfig cfg);

  /// State at cfg.t0 with u^{-1} = u^0 (zero velocity when u0 is empty).
  FomState initial_state(VelocityField u0 = {}) const;

  FomState step(const FomState& state);

  real next_step_size(const FomState& state) const;
  VectorX forcing_load(real t) const;
  VectorX dirichlet_values(real t) const;

  /// Fixed-point iterations used by the last step (1 for semi-implicit).
  int last_iterations() const { return last_iterations_; }

  const FomConfig& config() const { return cfg_; }
  const FemSpaces& spaces() const { return *spaces_; }
  const FomOperators& operators() const { return *ops_; }

 private:
  FomState bdf2_step(const FomState& s);
  FomState euler_step(const FomState& s);

  const FemSpaces* spaces_;
  const FomOperators* ops_;
  FomConfig cfg_;
  std::vector<VectorX> shape_loads_;
  SaddlePointSolver solver_;
  int last_iterations_ = 0;
};

/// Semi-implicit BDF2 step with the extrapolated convection velocity
/// (1 + w) u^n - w u^{n-1}, w the step-size ratio.
inline FomState bdf2_semiimplicit_step(FomSolver& solver, const FomState& state) { return solver.step(state); }

struct FomRun {
  SnapshotSet snapshots;
  QoISeries qoi;
  FomState final_state;
};

/// Called after every step with the new state.
using FomObserver = std::function<void(const FomState&)>;

/// Impulsive start (zero velocity) at cfg.t0, integrated to cfg.t_end.
FomRun run_fom(const FemSpaces& spaces, const FomOperators& ops, const FomConfig& cfg,
               const FomObserver& observer = {});

}  // namespace gdrom
