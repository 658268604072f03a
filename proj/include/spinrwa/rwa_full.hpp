#pragma once

#include "spinrwa/propagator.hpp"
#include "spinrwa/spin_algebra.hpp"

namespace spinrwa {

/// Rotating-frame generator and time-independent effective Hamiltonian.
struct FullRwaGenerator {
  ComplexMatrix frame;  // Iz Ia (integer) or Iz Ia + Sz (product space)
  ComplexMatrix heff;
};

/// H_eff = Q Iz^2 - w Iz Ia + B0 Iz + (B1/2) Ix
FullRwaGenerator full_rwa_generator(const SpinParams& params);

/// e^{-i w t Iz Ia} e^{-i H_eff t}; integer spin only.
class FullRwaInteger {
public:
  explicit FullRwaInteger(const SpinParams& params);
  Propagator at(double t) const;
  const FullRwaGenerator& generator() const noexcept { return gen_; }

private:
  SpinParams params_;
  FullRwaGenerator gen_;
  SpectralExponential frame_;
  SpectralExponential heff_;
};

/// Half-integer J treated as (1/2) x (I_int = J - 1/2):
/// U_product = e^{-i w t Iz Ia} e^{-i w t Sz} e^{-i H'_eff t}, projected onto the
/// J multiplet as E^dag U_product E and polar-projected onto the nearest
/// unitary. Diagnostics: "leakage" = ||U_product E - E U_J||_max before
/// projection, "min_singular" of E^dag U_product E, "j2_commutator"
/// = ||[U_product, J^2]||_max.
class FullRwaHalfInteger {
public:
  explicit FullRwaHalfInteger(const SpinParams& params);
  Propagator at(double t) const;

  /// H'_eff in the product space (constant Q Sz^2 dropped).
  const ComplexMatrix& product_heff() const noexcept { return heff_matrix_; }
  const ComplexMatrix& embedding() const noexcept { return embedding_; }
  ComplexMatrix product_propagator(double t) const;

private:
  SpinParams params_;
  ComplexMatrix embedding_;
  ComplexMatrix heff_matrix_;
  ComplexMatrix j_squared_;
  RealVector frame_diag_;  // eigenvalues of Iz Ia (x) 1 + 1 (x) Sz, diagonal in the product basis
  SpectralExponential heff_;
};

/// Leakage above which a warning is attached to half-integer propagators.
inline constexpr double kLeakageWarnThreshold = 1e-6;

Propagator full_rwa_integer(const SpinParams& params, double t);
Propagator full_rwa_half_integer(const SpinParams& params, double t);

}  // namespace spinrwa
