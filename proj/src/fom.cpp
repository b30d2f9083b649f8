#include "gdrom/fom.hpp"

#include "gdrom/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gdrom {

Forcing rotating_gyres(real amplitude, real period) {
  constexpr real pi = std::numbers::pi;
  const real w = 2.0 * pi / period;
  auto first = [](const Point& x) -> Eigen::Vector2d {
    const real sx = std::sin(pi * x.x()), sy = std::sin(pi * x.y());
    const real dx = 2.0 * pi * sx * std::cos(pi * x.x()) * sy * sy;
    const real dy = 2.0 * pi * sy * std::cos(pi * x.y()) * sx * sx;
    return {dy, -dx};
  };
  auto second = [](const Point& x) -> Eigen::Vector2d {
    const real sy = std::sin(pi * x.y());
    const real dx = 2.0 * pi * std::cos(2.0 * pi * x.x()) * sy * sy;
    const real dy = std::sin(2.0 * pi * x.x()) * 2.0 * pi * sy * std::cos(pi * x.y());
    return {dy, -dx};
  };
  Forcing f;
  f.terms.push_back({[=](real t) { return amplitude * std::cos(w * t); }, first});
  f.terms.push_back({[=](real t) { return amplitude * std::sin(w * t); }, second});
  return f;
}

BoundaryData no_slip() {
  return [](BoundaryTag, const Point&, real) { return Eigen::Vector2d::Zero().eval(); };
}

BoundaryData parabolic_inflow(real u_max, real height) {
  return [u_max, height](BoundaryTag tag, const Point& x, real) -> Eigen::Vector2d {
    if (tag != BoundaryTag::inflow) return Eigen::Vector2d::Zero();
    return {4.0 * u_max * x.y() * (height - x.y()) / (height * height), 0.0};
  };
}

void FomConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("fom: dt must be positive");
  if (!(nu > 0.0)) throw std::invalid_argument("fom: nu must be positive");
  if (!(t_end >= t0)) throw std::invalid_argument("fom: t_end before t0");
  if (stride < 1) throw std::invalid_argument("fom: stride must be >= 1");
  if (snap_end > snap_start && (snap_start < t0 || snap_end > t_end + 1e-9 * dt))
    throw std::invalid_argument("fom: snapshot window must lie inside [t0, t_end]");
  if (!boundary) throw std::invalid_argument("fom: boundary data missing");
}

FomSolver::FomSolver(const FemSpaces& spaces, const FomOperators& ops, FomConfig cfg)
    : spaces_(&spaces),
      ops_(&ops),
      cfg_(std::move(cfg)),
      solver_(ops, spaces.dirichlet_mask(), !spaces.has_outflow()) {
  cfg_.validate();
  for (const auto& term : cfg_.forcing.terms) shape_loads_.push_back(load_vector(spaces, term.shape));
}

FomState FomSolver::initial_state(VelocityField u0) const {
  FomState s;
  s.u = u0.size() ? std::move(u0) : VelocityField::Zero(spaces_->n_velocity());
  if (s.u.size() != spaces_->n_velocity()) throw std::invalid_argument("initial_state: size mismatch");
  s.u_prev = s.u;
  s.p = PressureField::Zero(spaces_->n_pressure());
  s.time = cfg_.t0;
  return s;
}

VectorX FomSolver::forcing_load(real t) const {
  VectorX f = VectorX::Zero(spaces_->n_velocity());
  for (std::size_t m = 0; m < shape_loads_.size(); ++m) f += cfg_.forcing.terms[m].amplitude(t) * shape_loads_[m];
  return f;
}

VectorX FomSolver::dirichlet_values(real t) const {
  const Index ns = spaces_->n_scalar();
  VectorX g = VectorX::Zero(spaces_->n_velocity());
  for (Index s = 0; s < ns; ++s) {
    const auto& tag = spaces_->dof_tag(s);
    if (!tag || *tag == BoundaryTag::outflow) continue;
    const Eigen::Vector2d v = cfg_.boundary(*tag, spaces_->dof_point(s), t);
    g[s] = v.x();
    g[ns + s] = v.y();
  }
  return g;
}

real FomSolver::next_step_size(const FomState& s) const {
  if (cfg_.scheme == FomScheme::bdf2_semi_implicit && s.dt_prev == 0.0) return (2.0 / 3.0) * cfg_.dt;
  return cfg_.dt;
}

FomState FomSolver::step(const FomState& s) {
  return cfg_.scheme == FomScheme::bdf2_semi_implicit ? bdf2_step(s) : euler_step(s);
}

FomState FomSolver::bdf2_step(const FomState& s) {
  const real k = next_step_size(s);
  real a0 = 1.0, a1 = -1.0, a2 = 0.0;
  VelocityField extrapolated = s.u;
  if (s.dt_prev > 0.0) {
    // Variable-step BDF2; reduces to (3, -4, 1) / 2 when k == dt_prev.
    const real w = k / s.dt_prev;
    a0 = (1.0 + 2.0 * w) / (1.0 + w);
    a1 = -(1.0 + w);
    a2 = w * w / (1.0 + w);
    extrapolated = (1.0 + w) * s.u - w * s.u_prev;
  }
  const real t_new = s.time + k;
  SparseMatrix block = (a0 / k) * ops_->mass + cfg_.nu * ops_->stiffness;
  if (cfg_.convection != 0.0) block += cfg_.convection * convection_matrix(*spaces_, extrapolated);
  VectorX rhs = forcing_load(t_new) - ops_->mass * ((a1 * s.u + a2 * s.u_prev) / k);
  solver_.factorize(block, s.step + 1);
  auto sol = solver_.solve(rhs, dirichlet_values(t_new));
  last_iterations_ = 1;
  return {std::move(sol.u), s.u, std::move(sol.p), s.step + 1, t_new, k};
}

FomState FomSolver::euler_step(const FomState& s) {
  const real k = cfg_.dt;
  const real t_new = s.time + k;
  const VectorX rhs = forcing_load(t_new) + ops_->mass * (s.u / k);
  const VectorX values = dirichlet_values(t_new);
  const SparseMatrix linear = (1.0 / k) * ops_->mass + cfg_.nu * ops_->stiffness;

  VelocityField guess = s.u;
  for (int it = 1; it <= cfg_.max_iterations; ++it) {
    SparseMatrix block = linear;
    if (cfg_.convection != 0.0) block += cfg_.convection * convection_matrix(*spaces_, guess);
    solver_.factorize(block, s.step + 1);
    auto sol = solver_.solve(rhs, values);
    const real change = (sol.u - guess).norm() / std::max(sol.u.norm(), 1e-300);
    guess = std::move(sol.u);
    if (cfg_.convection == 0.0 || change <= cfg_.tolerance) {
      last_iterations_ = it;
      return {std::move(guess), s.u, std::move(sol.p), s.step + 1, t_new, k};
    }
  }
  throw SolverError(s.step + 1, "fixed-point iteration did not converge in " +
                                    std::to_string(cfg_.max_iterations) + " iterations");
}

FomRun run_fom(const FemSpaces& spaces, const FomOperators& ops, const FomConfig& cfg, const FomObserver& observer) {
  FomSolver solver(spaces, ops, cfg);
  std::optional<DragLiftEvaluator> drag_lift;
  if (spaces.mesh().has_tag(BoundaryTag::cylinder))
    drag_lift.emplace(spaces, ops, stokes_test_functions(spaces, ops), cfg.scales);

  FomRun run;
  run.snapshots.dt = cfg.stride * cfg.dt;
  std::vector<VectorX> stored;
  const real eps = 1e-9 * cfg.dt;
  long in_window = 0;

  FomState state = solver.initial_state();
  while (state.time + solver.next_step_size(state) <= cfg.t_end + eps) {
    state = solver.step(state);
    DragLift dl{0.0, 0.0};
    if (drag_lift) dl = (*drag_lift)(state.u, state.u_prev, state.dt_prev, cfg.nu);
    run.qoi.push(state.time, kinetic_energy(ops.mass, state.u), dl.drag, dl.lift);
    if (state.time >= cfg.snap_start - eps && state.time < cfg.snap_end - eps) {
      if ((in_window + 1) % cfg.stride == 0) {
        if (stored.empty()) run.snapshots.t_first = state.time;
        stored.push_back(state.u);
      }
      ++in_window;
    }
    if (observer) observer(state);
  }
  run.snapshots.data.resize(spaces.n_velocity(), static_cast<Index>(stored.size()));
  for (std::size_t j = 0; j < stored.size(); ++j) run.snapshots.data.col(static_cast<Index>(j)) = stored[j];
  run.final_state = std::move(state);
  return run;
}

}  // namespace gdrom
