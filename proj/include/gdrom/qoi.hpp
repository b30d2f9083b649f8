#pragma once

#include "gdrom/operators.hpp"

#include <span>
#include <vector>

namespace gdrom {

/// Per-step quantities of interest.
struct QoISeries {
  std::vector<real> t;
  std::vector<real> e_kin;
  std::vector<real> c_d;
  std::vector<real> c_l;

  void push(real time, real energy, real drag, real lift) {
    t.push_back(time);
    e_kin.push_back(energy);
    c_d.push_back(drag);
    c_l.push_back(lift);
  }
  std::size_t size() const { return t.size(); }
};

/// E_kin = 1/2 ||u||_0^2.
inline real kinetic_energy(const SparseMatrix& mass, const VelocityField& u) { return 0.5 * u.dot(mass * u); }

/// Discretely divergence-free fields equal to (1,0) resp. (0,1) on the
/// cylinder and zero on every other boundary edge.
struct DragLiftTestFunctions {
  VelocityField drag;
  VelocityField lift;
};

DragLiftTestFunctions stokes_test_functions(const FemSpaces& spaces, const FomOperators& ops);

struct DragLiftScales {
  real diameter = 0.1;
  real mean_velocity = 1.0;
};

struct DragLift {
  real drag;
  real lift;
};

/// Volume-integral drag/lift coefficients; the pressure term vanishes because
/// the test functions are discretely divergence-free.  The time derivative is
/// the backward difference (u - u_prev) / dt.
class DragLiftEvaluator {
 public:
  DragLiftEvaluator(const FemSpaces& spaces, const FomOperators& ops, DragLiftTestFunctions tf,
                    DragLiftScales scales = {});

  DragLift operator()(const VelocityField& u, const VelocityField& u_prev, real dt, real nu) const;

  const DragLiftTestFunctions& test_functions() const { return tf_; }

 private:
  const FemSpaces* spaces_;
  DragLiftTestFunctions tf_;
  DragLiftScales scales_;
  VectorX mass_drag_, mass_lift_, stiff_drag_, stiff_lift_;
};

/// St = D f / U with f from the mean spacing of upward zero crossings of the
/// mean-removed lift signal.  Throws InsufficientData below two crossings.
real strouhal(std::span<const real> lift, real dt, real diameter, real mean_velocity);

}  // namespace gdrom
