#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinrwa/propagator.hpp"
#include "spinrwa/rwa_reduced.hpp"
#include "spinrwa/spin_algebra.hpp"

namespace spinrwa {

/// J_n(x) for n in {0, 1}, |x| <= 30, by its power series.
double bessel_j(int n, double x);

/// Dressing parameters at one parameter point. kappa is Q for the central
/// three-level block and w0 for a two-level block.
struct ChrwParams {
  double xi = 0.0;
  double kappa = 0.0;
  double B1_eff = 0.0;
  double omega = 0.0;
  double j0_2 = 1.0;  // J0(2 B1_eff xi / w)
  double j1_2 = 0.0;  // J1(2 B1_eff xi / w)
  double j0_1 = 1.0;  // J0(B1_eff xi / w)
  double j1_1 = 0.0;  // J1(B1_eff xi / w)
  /// Co-rotating amplitude (B1_eff (1 - xi) + kappa J1(2 B1_eff xi / w)) / 2,
  /// which equals B1_eff (1 - xi) at the self-consistent xi.
  double B_renorm = 0.0;
  double residual = 0.0;  // kappa J1(2 B1_eff xi / w) - B1_eff (1 - xi)
  std::vector<std::string> warnings;
};

/// Evaluates the dressing quantities at a given xi (no root search).
ChrwParams chrw_params_at(double kappa, double B1_eff, double omega, double xi);

/// Root of kappa J1(2 B1_eff xi / w) = B1_eff (1 - xi) on [0, 1]: 64-interval
/// sign scan then bisection. B1_eff = 0 returns xi = 1 (drive absent).
/// Throws RootNotFoundError when the scan finds no sign change.
ChrwParams solve_xi(double kappa, double B1_eff, double omega);

struct ChrwOptions {
  /// Diagnostic override of the self-consistent xi.
  std::optional<double> forced_xi;
};

/// Effective Hamiltonian of the dressed central triple in the rotating frame.
ComplexMatrix chrw_three_level_heff(const SpinParams& params, const ChrwParams& cp);
/// Closed-form normalisation of the dressed explicit SU(3) sum (may be <= 0).
double chrw_three_level_formula_u(const SpinParams& params, const ChrwParams& cp);

/// Agreement between the explicit SU(3) route and the spectral route.
struct ChrwCrossCheck {
  double u_formula = 0.0;
  double u_trace = 0.0;
  /// ||explicit(u_formula) - spectral||_max, NaN when u_formula <= 0 or the form
  /// cannot be built.
  double residual_formula_u = 0.0;
  /// ||explicit(u_trace) - spectral||_max
  double residual_trace_u = 0.0;
  /// True when the explicit route with the formula u is unusable (u <= 0 or
  /// residual above 1e-6), i.e. the spectral route had to be used.
  bool fallback = false;
};

/// exp[-i (B1'/w) xi sin(w t) Sx] exp(-i w Sz^2 t) exp(-i H'_eff t) on the
/// central triple. The spectral route is authoritative.
class ChrwThreeLevel {
public:
  ChrwThreeLevel(const SpinParams& params, const ChrwOptions& opts = {});
  ComplexMatrix at(double t) const;
  /// Explicit SU(3) evaluation with the given normalisation u.
  ComplexMatrix explicit_at(double t, double u) const;
  ChrwCrossCheck cross_check(double t) const;
  const ChrwParams& dressing() const noexcept { return cp_; }
  const ComplexMatrix& heff() const noexcept { return heff_; }

private:
  SpinParams params_;
  ChrwParams cp_;
  ComplexMatrix heff_;
  SpectralExponential evo_;
};

ComplexMatrix chrw_three_level_propagator(const SpinParams& params, double t);

/// exp[-i (B1'/w) xi sin(w t) sigma_x] exp(-i w sigma_z t/2) exp(-i H'_eff t),
/// H'_eff = [w0/2 J0(2 B1' xi / w) - w/2] sigma_z + B_renorm sigma_x. The minus
/// side is sigma_x U_plus(w0_minus) sigma_x (descending-M storage).
class ChrwTwoLevel {
public:
  ChrwTwoLevel(const ReducedBlockSpec& spec, Side side, const SpinParams& params, const ChrwOptions& opts = {});
  ComplexMatrix at(double t) const;
  const ChrwParams& dressing() const noexcept { return cp_; }

private:
  double omega_;
  Side side_;
  ChrwParams cp_;
  ComplexMatrix heff_;
};

ComplexMatrix chrw_two_level_propagator(const ReducedBlockSpec& spec, Side side, const SpinParams& params, double t,
                                        const ChrwOptions& opts = {});

/// Reduced-space assembly with CHRW blocks.
class ChrwAssembled {
public:
  explicit ChrwAssembled(const SpinParams& params, const ChrwOptions& opts = {});
  ChrwAssembled(const SpinParams& params, ReducedBlockSpec spec, const ChrwOptions& opts = {});
  Propagator at(double t) const;
  const ReducedBlockSpec& spec() const noexcept { return spec_; }

private:
  SpinParams params_;
  ReducedBlockSpec spec_;
  std::optional<ChrwThreeLevel> three_;
  std::vector<ChrwTwoLevel> two_;  // indexed like active_sides(spec)
};

Propagator assemble_chrw(const SpinParams& params, const ReducedBlockSpec& spec, double t);

}  // namespace spinrwa
