#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spinrwa/propagator.hpp"
#include "spinrwa/spin_algebra.hpp"

namespace spinrwa {

enum class BlockKind { TwoLevelPair, CentralThreeLevel, CentralTwoLevelHalf };
enum class Side { Plus, Minus };

/// Near-resonant subspace targeted by the drive. M_target is the upper level
/// of the |M> <-> |M-1> transition.
struct ReducedBlockSpec {
  double M_target = 1.0;
  BlockKind kind = BlockKind::CentralThreeLevel;
  double omega0_plus = 0.0;   // (2M-1) Q + B0
  double omega0_minus = 0.0;  // (2M-1) Q - B0
  double B1_eff = 0.0;
  std::vector<std::string> warnings;
};

/// Nearest transition to the drive; ties go to the smaller M.
ReducedBlockSpec select_block(const SpinParams& params);
/// Block pinned to a given M (1/2 <= M <= I, M - I integer).
ReducedBlockSpec make_block(const SpinParams& params, double M_target);

/// Basis indices (descending-M order) of the block on one side. The central
/// blocks only have a Plus side.
std::vector<Eigen::Index> block_indices(const SpinParams& params, const ReducedBlockSpec& spec, Side side);
std::vector<Side> active_sides(const ReducedBlockSpec& spec);

/// Resonance frequency of the block side (w0_plus for Plus, w0_minus for Minus).
double block_omega0(const ReducedBlockSpec& spec, Side side);

/// e^{-/+ i w sigma_z t/2} e^{-i H_eff t} on one two-level block, with
/// H_eff = (w0 - w)/2 sigma_z + (B1_eff/2) sigma_x in the block's own
/// orientation. Minus blocks are stored in descending-M order, which reverses
/// the sign of sigma_z; the result is sigma_x U_plus(w0_minus) sigma_x.
ComplexMatrix two_level_block_propagator(const ReducedBlockSpec& spec, Side side, const SpinParams& params,
                                         double t);

/// tau-coefficient form of the plus-side two-level propagator:
/// U = tau0 1 - i tau_x/2 sigma_x - i tau_y/2 sigma_y - i tau_z/2 sigma_z.
struct TwoLevelClosedForm {
  double Delta = 0.0;
  double Omega = 0.0;
  double tau0 = 0.0;
  double taux = 0.0;
  double tauy = 0.0;
  double tauz = 0.0;

  ComplexMatrix matrix() const;
};

TwoLevelClosedForm two_level_tau_form(double omega0, double B1_eff, double omega, double t);

/// Closed-form exponential of a 3x3 Hermitian generator through its
/// normalised traceless part Hcal = sqrt(2/u) (H - tr(H)/3).
struct Su3ClosedForm {
  double u = 0.0;
  double alpha = 0.0;
  double shift = 0.0;  // tr(H)/3
  ComplexMatrix Hcal;

  /// e^{-i H t}. Throws NumericalError when two eigenvalues coincide (the
  /// projector denominators vanish).
  ComplexMatrix exponential(double t) const;
};

/// Builds the form for a given normalisation u. Throws NumericalError when
/// |(3 sqrt 3 / 2) det Hcal| exceeds 1 by more than 1e-10.
Su3ClosedForm make_su3_form(const ComplexMatrix& h, double u);
/// u = tr[(H - tr(H)/3)^2], the value for which tr(Hcal^2) = 2.
double su3_trace_normalisation(const ComplexMatrix& h);

/// (Q - w) Sz^2 + B0 Sz + (B1'/2) Sx with B1' = sqrt(I(I+1)/2) B1.
ComplexMatrix three_level_rwa_heff(const SpinParams& params);
/// 2 B0^2 + B1'^2/2 + 2 (Q - w)^2 / 3
double three_level_rwa_u(const SpinParams& params);

/// e^{-i w Sz^2 t} e^{-i H_eff t} via the SU(3) closed form; falls back to the
/// spectral route when H_eff is (numerically) degenerate.
ComplexMatrix three_level_su3_propagator(const SpinParams& params, double t);

/// Block propagator for one side of a reduced block at time t.
using BlockFunction = std::function<ComplexMatrix(const ReducedBlockSpec&, Side, double)>;

/// Full-dimension propagator: the block propagator on the active levels and
/// e^{-i(Q M^2 + B0 M) t} elsewhere. Two-level blocks also carry the phase of
/// their dropped constant (Q M^2 + B0 M - w0/2).
Propagator assemble_reduced(const SpinParams& params, const ReducedBlockSpec& spec, double t,
                            const BlockFunction& block_method);

/// Standard reduced RWA (SU(3) block for the central triple, two-level blocks otherwise).
class ReducedRwa {
public:
  explicit ReducedRwa(const SpinParams& params);
  ReducedRwa(const SpinParams& params, ReducedBlockSpec spec);

  Propagator at(double t) const;
  const ReducedBlockSpec& spec() const noexcept { return spec_; }

private:
  SpinParams params_;
  ReducedBlockSpec spec_;
  Su3ClosedForm su3_;
  bool su3_ok_ = false;
  ComplexMatrix heff3_;
};

/// e^{-i w Iz t} e^{-i H_eff t}, H_eff = (B0 - w) Iz + Q Iz^2 + (B1/2) Ix.
class ZeemanRwa {
public:
  explicit ZeemanRwa(const SpinParams& params);
  Propagator at(double t) const;

private:
  SpinParams params_;
  SpectralExponential frame_;
  SpectralExponential heff_;
};

Propagator zeeman_rwa_propagator(const SpinParams& params, double t);

/// Pauli matrices used by the two-level blocks.
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

}  // namespace spinrwa
