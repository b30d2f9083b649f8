#include "gdrom/rom.hpp"

#include "gdrom/errors.hpp"

#include <Eigen/LU>

#include <cmath>

namespace gdrom {

std::string to_string(RomVariant v) {
  switch (v) {
    case RomVariant::g_rom:
      return "g-rom";
    case RomVariant::grad_div_rom:
      return "grad-div-rom";
    case RomVariant::da_rom:
      return "da-rom";
    case RomVariant::grad_div_da_rom:
      return "grad-div-da-rom";
  }
  return "?";
}

RomVariant parse_rom_variant(const std::string& name) {
  for (auto v : {RomVariant::g_rom, RomVariant::grad_div_rom, RomVariant::da_rom, RomVariant::grad_div_da_rom})
    if (name == to_string(v)) return v;
  throw std::invalid_argument("unknown ROM variant '" + name + "'");
}

std::string to_string(RomScheme s) { return s == RomScheme::euler ? "euler" : "bdf2"; }

RomScheme parse_rom_scheme(const std::string& name) {
  if (name == "euler") return RomScheme::euler;
  if (name == "bdf2") return RomScheme::bdf2;
  throw std::invalid_argument("unknown ROM scheme '" + name + "'");
}

RomParameters apply_variant(RomVariant variant, RomParameters p) {
  if (variant == RomVariant::g_rom || variant == RomVariant::da_rom) p.mu = 0.0;
  if (variant == RomVariant::g_rom || variant == RomVariant::grad_div_rom) p.beta = 0.0;
  return p;
}

VectorX RomSystem::forcing(real t) const {
  VectorX f = VectorX::Zero(size());
  for (std::size_t m = 0; m < forcing_loads.size(); ++m) f += forcing_amplitudes[m](t) * forcing_loads[m];
  return f;
}

MatrixX RomSystem::convection_matrix(const VectorX& w) const {
  MatrixX c = MatrixX::Zero(size(), size());
  for (Index i = 0; i < size(); ++i) c += w[i] * convection[i];
  return c;
}

VectorX RomSystem::data(real t) const {
  return nudging.count() > 0 ? nudging.data_at(t) : VectorX::Zero(size());
}

RomSystem build_rom_system(const PodBasis& basis, const FemSpaces& spaces, const FomOperators& ops,
                           NudgingAlgebra nudging, RomParameters params, const Forcing& forcing) {
  const Index l = basis.size();
  if (l < 1 || l > kMaxRomSize) throw std::invalid_argument("build_rom_system: l must lie in [1, 64]");
  if (basis.n_dofs() != spaces.n_velocity()) throw std::invalid_argument("build_rom_system: size mismatch");
  if (nudging.gram.rows() != l) throw std::invalid_argument("build_rom_system: nudging algebra of wrong size");

  RomSystem sys;
  const MatrixX& psi = basis.modes;
  sys.stiffness = gradient_gram(spaces, psi);
  sys.grad_div = divergence_gram(spaces, psi);
  sys.convection.reserve(l);
  MatrixX by_mode_on_mean(l, basis.centered ? l : 0);  // column j: b_h(psi_j, mean, psi_k)
  for (Index i = 0; i < l; ++i) {
    const SparseMatrix c = convection_matrix(spaces, psi.col(i));
    sys.convection.push_back(psi.transpose() * (c * psi));
    if (basis.centered) by_mode_on_mean.col(i) = psi.transpose() * (c * basis.mean);
  }
  for (const auto& term : forcing.terms) {
    sys.forcing_amplitudes.push_back(term.amplitude);
    sys.forcing_loads.push_back(psi.transpose() * load_vector(spaces, term.shape));
  }
  sys.nudging = std::move(nudging);
  sys.params = params;

  sys.centered = basis.centered;
  if (basis.centered) {
    const VectorX& m = basis.mean;
    sys.mean_stiffness = psi.transpose() * (ops.stiffness * m);
    sys.mean_grad_div = psi.transpose() * (ops.grad_div * m);
    const SparseMatrix cm = convection_matrix(spaces, m);
    sys.mean_convection = psi.transpose() * (cm * m);
    sys.mean_coupling = psi.transpose() * (cm * psi) + by_mode_on_mean;
    sys.mean_nudging = sys.nudging.weights * m;
    sys.mean_mass = psi.transpose() * (ops.mass * m);
    sys.mean_energy = m.dot(ops.mass * m);
  }
  return sys;
}

namespace {

// Terms of the reduced momentum equation that do not multiply the unknown:
// forcing, nudging data and the constant mean contributions.
VectorX explicit_terms(const RomSystem& sys, const RomParameters& p, const VectorX& data, real t) {
  VectorX r = sys.forcing(t) + p.beta * data;
  if (sys.centered)
    r -= p.nu * sys.mean_stiffness + p.mu * sys.mean_grad_div + sys.mean_convection + p.beta * sys.mean_nudging;
  return r;
}

// Part of the system matrix that does not depend on the convection velocity.
MatrixX linear_part(const RomSystem& sys, const RomParameters& p, real mass_coefficient) {
  MatrixX k = mass_coefficient * MatrixX::Identity(sys.size(), sys.size()) + p.nu * sys.stiffness +
              p.mu * sys.grad_div + p.beta * sys.nudging.gram;
  if (sys.centered) k += sys.mean_coupling;
  return k;
}

VectorX solve_dense(const MatrixX& k, const VectorX& rhs, long step) {
  Eigen::FullPivLU<MatrixX> lu(k);
  if (!lu.isInvertible()) throw SolverError(step, "singular reduced matrix");
  VectorX a = lu.solve(rhs);
  if (!a.allFinite()) throw SolverError(step, "non-finite reduced solution");
  return a;
}

RomState euler_impl(const RomState& s, const RomSystem& sys, const RomParameters& p, const VectorX& data, real dt,
                    RomStepInfo* info, int max_iterations, real tol) {
  const real t_new = s.time + dt;
  const MatrixX lin = linear_part(sys, p, 1.0 / dt);
  const VectorX rhs = s.a / dt + explicit_terms(sys, p, data, t_new);
  const real scale = std::max(1.0, rhs.norm());
  VectorX a = s.a;
  real residual = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    a = solve_dense(lin + sys.convection_matrix(a), rhs, s.step + 1);
    residual = ((lin + sys.convection_matrix(a)) * a - rhs).norm();
    if (residual <= tol * scale) {
      if (info) *info = {it, residual};
      return {std::move(a), s.a, s.step + 1, t_new, dt};
    }
  }
  throw SolverError(s.step + 1, "fixed-point iteration did not converge, last residual " + format_real(residual));
}

RomState bdf2_impl(const RomState& s, const RomSystem& sys, const RomParameters& p, const VectorX& data, real dt) {
  const real k = rom_next_step_size(s, RomScheme::bdf2, dt);
  real a0 = 1.0, a1 = -1.0, a2 = 0.0;
  VectorX extrapolated = s.a;
  if (s.dt_prev > 0.0) {
    const real w = k / s.dt_prev;
    a0 = (1.0 + 2.0 * w) / (1.0 + w);
    a1 = -(1.0 + w);
    a2 = w * w / (1.0 + w);
    extrapolated = (1.0 + w) * s.a - w * s.a_prev;
  }
  const real t_new = s.time + k;
  const MatrixX m = linear_part(sys, p, a0 / k) + sys.convection_matrix(extrapolated);
  const VectorX rhs = explicit_terms(sys, p, data, t_new) - (a1 * s.a + a2 * s.a_prev) / k;
  return {solve_dense(m, rhs, s.step + 1), s.a, s.step + 1, t_new, k};
}

}  // namespace

RomState initial_rom_state(VectorX a0, real t0) {
  RomState s;
  s.a_prev = a0;
  s.a = std::move(a0);
  s.time = t0;
  return s;
}

RomState rom_step_implicit_euler(const RomState& s, const RomSystem& sys, const VectorX& data, real dt,
                                 RomStepInfo* info, int max_iterations, real tol) {
  return euler_impl(s, sys, sys.params, data, dt, info, max_iterations, tol);
}

RomState rom_step_bdf2_semiimplicit(const RomState& s, const RomSystem& sys, const VectorX& data, real dt) {
  return bdf2_impl(s, sys, sys.params, data, dt);
}

real rom_kinetic_energy(const RomSystem& sys, const VectorX& a) {
  real e = a.squaredNorm();
  if (sys.centered) e += sys.mean_energy + 2.0 * a.dot(sys.mean_mass);
  return 0.5 * e;
}

RomTrajectory run_rom(RomVariant variant, const RomSystem& sys, const RomSchedule& schedule, const VectorX& a0,
                      const RomObserver& observer, RomTrajectory* partial) {
  if (!(schedule.dt > 0.0)) throw std::invalid_argument("run_rom: dt must be positive");
  if (a0.size() != sys.size()) throw std::invalid_argument("run_rom: initial state of wrong size");
  const RomParameters p = apply_variant(variant, sys.params);
  if (p.beta > 0.0 && sys.nudging.count() == 0) throw std::invalid_argument("run_rom: nudging without observations");

  std::vector<VectorX> levels{a0};
  RomTrajectory out;
  out.t.push_back(schedule.t_start);
  out.e_kin.push_back(rom_kinetic_energy(sys, a0));
  auto finish = [&](RomTrajectory& traj) {
    traj.a.resize(sys.size(), static_cast<Index>(levels.size()));
    for (std::size_t j = 0; j < levels.size(); ++j) traj.a.col(static_cast<Index>(j)) = levels[j];
  };

  RomState s = initial_rom_state(a0, schedule.t_start);
  const real eps = 1e-9 * schedule.dt;
  try {
    while (s.time + rom_next_step_size(s, schedule.scheme, schedule.dt) <= schedule.t_end + eps) {
      const real t_new = s.time + rom_next_step_size(s, schedule.scheme, schedule.dt);
      const VectorX d = sys.data(t_new);
      s = schedule.scheme == RomScheme::bdf2 ? bdf2_impl(s, sys, p, d, schedule.dt)
                                             : euler_impl(s, sys, p, d, schedule.dt, nullptr, 50, 1e-12);
      levels.push_back(s.a);
      out.t.push_back(s.time);
      out.e_kin.push_back(rom_kinetic_energy(sys, s.a));
      if (observer) observer(s);
    }
  } catch (const SolverError&) {
    if (partial) {
      *partial = out;
      finish(*partial);
    }
    throw;
  }
  finish(out);
  return out;
}

}  // namespace gdrom
