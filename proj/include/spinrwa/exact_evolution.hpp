#pragma once

#include <span>
#include <vector>

#include "spinrwa/propagator.hpp"
#include "spinrwa/spin_algebra.hpp"

namespace spinrwa {

/// Step control for the Runge-Kutta reference solver.
struct ExactSolverConfig {
  double dt = 0.0;  // <= 0 selects default_dt(params)
  bool renormalize = true;
  int renorm_interval = 1000;
  bool allow_large_step = false;  // skip the dt <= (2 pi / w_max) / 100 check
  /// Integrate in the interaction picture of Q Iz^2 + B0 Iz (false: lab frame).
  bool interaction_frame = true;
};

/// max(|w|, (2I-1) Q + B0)
double max_frequency(const SpinParams& params);
/// (2 pi / w_max) / 200
double default_dt(const SpinParams& params);
/// Effective step; throws ConfigError if dt exceeds (2 pi / w_max) / 100
/// without allow_large_step.
double resolve_dt(const SpinParams& params, const ExactSolverConfig& cfg);

/// H(t) = Q Iz^2 + B0 Iz + B1 cos(w t) Ix
ComplexMatrix lab_hamiltonian(const SpinParams& params, double t);

/// U(t_final) from i dU/dt = H(t) U, U(0) = 1, by classical RK4.
Propagator rk4_propagator(const SpinParams& params, double t_final, const ExactSolverConfig& cfg = {});

/// U at each of the non-decreasing sample times. The integrator lands on each
/// sample exactly by shortening the last step of every segment.
std::vector<ComplexMatrix> rk4_checkpoints(const SpinParams& params, std::span<const double> times,
                                           const ExactSolverConfig& cfg = {});

struct SpinVectorSample {
  double t = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double vz = 0.0;
};

/// Free quadrupole evolution from the I_x eigenstate: V = I cos(Qt)^{2I-1} x.
SpinVectorSample spin_vector_closed(Spin spin, double Q, double t);

enum class Chirality { Static, Clockwise, Counterclockwise };

/// One term of the rotating-vector expansion. A Clockwise term contributes
/// weight (cos w t, sin w t), Counterclockwise weight (cos w t, -sin w t),
/// Static weight x-hat.
struct RotatingTerm {
  double frequency = 0.0;
  double weight = 0.0;
  Chirality chirality = Chirality::Static;
};

std::vector<RotatingTerm> spin_vector_decomposition(Spin spin, double Q);
SpinVectorSample resum(std::span<const RotatingTerm> terms, double t);

}  // namespace spinrwa
