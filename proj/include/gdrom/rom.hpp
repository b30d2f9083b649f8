#pragma once

#include "gdrom/fom.hpp"
#include "gdrom/nudging.hpp"
#include "gdrom/pod.hpp"

#include <functional>
#include <string>
#include <vector>

namespace gdrom {

enum class RomVariant { g_rom, grad_div_rom, da_rom, grad_div_da_rom };

std::string to_string(RomVariant v);
RomVariant parse_rom_variant(const std::string& name);

enum class RomScheme { euler, bdf2 };

std::string to_string(RomScheme s);
RomScheme parse_rom_scheme(const std::string& name);

struct RomParameters {
  real nu = 1e-3;
  real mu = 0.0;
  real beta = 0.0;
};

/// Zeroes mu and/or beta as the variant prescribes.
RomParameters apply_variant(RomVariant variant, RomParameters p);

/// Reduced operators on an orthonormal basis (the reduced mass is the identity).
///
/// The convection tensor is stored as matrices N_i with
/// N_i(k, j) = b_h(psi_i, psi_j, psi_k), so b_h(u, v, psi_k) = sum_i u_i (N_i v)_k.
/// For a centered basis u = mean + sum_k a_k psi_k, and the mean_* members
/// collect the terms the mean contributes.
struct RomSystem {
  MatrixX stiffness;  // (grad psi_j, grad psi_i)
  MatrixX grad_div;   // (div psi_j, div psi_i)
  std::vector<MatrixX> convection;
  NudgingAlgebra nudging;

  std::vector<std::function<real(real)>> forcing_amplitudes;
  std::vector<VectorX> forcing_loads;  // (shape_m, psi_k)

  bool centered = false;
  VectorX mean_stiffness;    // (grad mean, grad psi_k)
  VectorX mean_grad_div;     // (div mean, div psi_k)
  VectorX mean_convection;   // b_h(mean, mean, psi_k)
  MatrixX mean_coupling;     // b_h(mean, psi_j, psi_k) + b_h(psi_j, mean, psi_k)
  VectorX mean_nudging;      // (I_H mean, I_H psi_k)
  VectorX mean_mass;         // (mean, psi_k)
  real mean_energy = 0.0;    // ||mean||^2

  RomParameters params;

  Index size() const { return stiffness.rows(); }
  VectorX forcing(real t) const;
  /// sum_i w_i N_i.
  MatrixX convection_matrix(const VectorX& w) const;
  /// Observation data at t, zero when there are no observations.
  VectorX data(real t) const;
};

inline constexpr Index kMaxRomSize = 64;

/// Galerkin projection of the fine operators.  The stiffness is assembled by
/// quadrature from the mode gradients, independently of basis.stiffness.
RomSystem build_rom_system(const PodBasis& basis, const FemSpaces& spaces, const FomOperators& ops,
                           NudgingAlgebra nudging, RomParameters params, const Forcing& forcing = {});

struct RomState {
  VectorX a;
  VectorX a_prev;
  long step = 0;
  real time = 0.0;
  real dt_prev = 0.0;  // 0: no history
};

RomState initial_rom_state(VectorX a0, real t0);

struct RomStepInfo {
  int iterations = 0;
  real residual = 0.0;
};

/// Implicit Euler with fixed-point iteration on the convection velocity.
/// Converges when the residual falls below tol * max(1, ||rhs||).
RomState rom_step_implicit_euler(const RomState& s, const RomSystem& sys, const VectorX& data, real dt,
                                 RomStepInfo* info = nullptr, int max_iterations = 50, real tol = 1e-12);

/// Semi-implicit BDF2 with extrapolated convection velocity; a state without
/// history takes a semi-implicit Euler step of (2/3) dt.
RomState rom_step_bdf2_semiimplicit(const RomState& s, const RomSystem& sys, const VectorX& data, real dt);

/// Step size the next BDF2 step will take.
inline real rom_next_step_size(const RomState& s, RomScheme scheme, real dt) {
  return scheme == RomScheme::bdf2 && s.dt_prev == 0.0 ? (2.0 / 3.0) * dt : dt;
}

/// E_kin of the reconstructed field from reduced variables.
real rom_kinetic_energy(const RomSystem& sys, const VectorX& a);

struct RomSchedule {
  real t_start = 0.0;
  real t_end = 1.0;
  real dt = 2e-3;
  RomScheme scheme = RomScheme::bdf2;
};

/// Coefficients per time level, the initial state included.
struct RomTrajectory {
  std::vector<real> t;
  MatrixX a;  // l x (steps + 1)
  std::vector<real> e_kin;
  Index size() const { return a.cols(); }
};

using RomObserver = std::function<void(const RomState&)>;

/// Runs the variant (parameters zeroed per variant) over the schedule.
/// Throws SolverError on a failed step; `partial` then holds the levels done.
RomTrajectory run_rom(RomVariant variant, const RomSystem& sys, const RomSchedule& schedule, const VectorX& a0,
                      const RomObserver& observer = {}, RomTrajectory* partial = nullptr);

}  // namespace gdrom
