#include "spinrwa/chrw.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "spinrwa/errors.hpp"

namespace spinrwa {

namespace {

constexpr int kScanPoints = 65;  // 64 intervals on [0, 1]

const SpinOperators& spin_one() {
  static const SpinOperators ops = spin_matrices(Spin::from_twice(2));
  return ops;
}

ComplexMatrix exp_sx_spin_one(double phi) {
  // e^{-i phi Sx} = 1 - i sin(phi) Sx + (cos(phi) - 1) Sx^2 for spin 1
  const ComplexMatrix& sx = spin_one().x;
  return ComplexMatrix::Identity(3, 3) - Complex(0.0, std::sin(phi)) * sx + (std::cos(phi) - 1.0) * (sx * sx);
}

ComplexMatrix sz2_phase(double omega, double t) {
  ComplexMatrix out = ComplexMatrix::Identity(3, 3);
  out(0, 0) = std::polar(1.0, -omega * t);
  out(2, 2) = std::polar(1.0, -omega * t);
  return out;
}

// e^{-i t (a_z sigma_z + a_x sigma_x)}
ComplexMatrix two_level_exp(double az, double ax, double t) {
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  const double a = std::hypot(az, ax);
  if (a == 0.0) return id;
  const ComplexMatrix h = az * pauli_z() + ax * pauli_x();
  return std::cos(a * t) * id - Complex(0.0, std::sin(a * t) / a) * h;
}

double g_xi(double kappa, double b, double omega, double xi) {
  return kappa * bessel_j(1, 2.0 * b * xi / omega) - b * (1.0 - xi);
}

}  // namespace

double bessel_j(int n, double x) {
  if (n != 0 && n != 1) throw PreconditionError("bessel_j: only orders 0 and 1 are implemented");
  if (!std::isfinite(x) || std::abs(x) > 30.0) {
    throw DomainError("bessel_j: |x| > 30 is outside the series range");
  }
  const double h = 0.5 * x;
  double term = n == 0 ? 1.0 : h;
  double sum = term;
  for (int m = 1; m < 200; ++m) {
    term *= -(h * h) / (static_cast<double>(m) * static_cast<double>(m + n));
    sum += term;
    if (term == 0.0 || std::abs(term) < 1e-17 * std::max(1.0, std::abs(sum))) break;
  }
  return sum;
}

ChrwParams chrw_params_at(double kappa, double B1_eff, double omega, double xi) {
  ChrwParams cp;
  cp.xi = xi;
  cp.kappa = kappa;
  cp.B1_eff = B1_eff;
  cp.omega = omega;
  const double arg = B1_eff * xi / omega;
  cp.j0_2 = bessel_j(0, 2.0 * arg);
  cp.j1_2 = bessel_j(1, 2.0 * arg);
  cp.j0_1 = bessel_j(0, arg);
  cp.j1_1 = bessel_j(1, arg);
  cp.residual = kappa * cp.j1_2 - B1_eff * (1.0 - xi);
  cp.B_renorm = 0.5 * (B1_eff * (1.0 - xi) + kappa * cp.j1_2);
  return cp;
}

ChrwParams solve_xi(double kappa, double B1_eff, double omega) {
  if (!(kappa > 0.0) || !(omega > 0.0) || !(B1_eff >= 0.0) || !std::isfinite(kappa) || !std::isfinite(B1_eff) ||
      !std::isfinite(omega)) {
    throw PreconditionError("solve_xi: requires kappa > 0, omega > 0, B1_eff >= 0");
  }
  if (B1_eff == 0.0) {
    ChrwParams cp = chrw_params_at(kappa, 0.0, omega, 1.0);
    cp.B_renorm = 0.0;
    return cp;
  }
  const double tol = 1e-12 * std::max(kappa, B1_eff);
  std::vector<double> xs(kScanPoints), gs(kScanPoints);
  for (int k = 0; k < kScanPoints; ++k) {
    xs[k] = static_cast<double>(k) / (kScanPoints - 1);
    gs[k] = g_xi(kappa, B1_eff, omega, xs[k]);
  }
  std::vector<std::pair<double, double>> brackets;
  for (int k = 0; k + 1 < kScanPoints; ++k) {
    if (gs[k] == 0.0) {
      brackets.emplace_back(xs[k], xs[k]);
    } else if (gs[k] * gs[k + 1] < 0.0) {
      brackets.emplace_back(xs[k], xs[k + 1]);
    }
  }
  if (gs.back() == 0.0) brackets.emplace_back(1.0, 1.0);
  if (brackets.empty()) {
    std::ostringstream msg;
    msg << "solve_xi: no sign change of g on [0, 1] (kappa=" << kappa << ", B1_eff=" << B1_eff
        << ", omega=" << omega << ", g(0)=" << gs.front() << ", g(1)=" << gs.back() << ")";
    throw RootNotFoundError(msg.str());
  }
  std::vector<double> roots;
  for (auto [lo, hi] : brackets) {
    double glo = g_xi(kappa, B1_eff, omega, lo);
    double mid = lo;
    for (int it = 0; it < 200 && hi > lo; ++it) {
      mid = 0.5 * (lo + hi);
      const double gm = g_xi(kappa, B1_eff, omega, mid);
      if (std::abs(gm) <= tol || hi - lo < 1e-16) break;
      if ((gm < 0.0) == (glo < 0.0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    roots.push_back(mid);
  }
  const double guess = omega / (kappa + omega);
  double best = roots.front();
  for (double r : roots) {
    if (std::abs(r - guess) < std::abs(best - guess)) best = r;
  }
  ChrwParams cp = chrw_params_at(kappa, B1_eff, omega, best);
  if (roots.size() > 1) {
    std::ostringstream msg;
    msg << "solve_xi: " << roots.size() << " roots on [0, 1]; using xi=" << best << " nearest to w/(kappa+w)";
    cp.warnings.push_back(msg.str());
  }
  return cp;
}

ComplexMatrix chrw_three_level_heff(const SpinParams& params, const ChrwParams& cp) {
  const SpinOperators& s = spin_one();
  const ComplexMatrix sz2 = s.z * s.z;
  const ComplexMatrix sy2 = s.y * s.y;
  return ((1.0 + cp.j0_2) / 2.0 * params.Q - params.omega) * sz2 + (1.0 - cp.j0_2) / 2.0 * params.Q * sy2 +
         cp.B_renorm * s.x + params.B0 * cp.j0_1 * s.z + params.B0 * cp.j1_1 * (s.x * s.z + s.z * s.x);
}

double chrw_three_level_formula_u(const SpinParams& params, const ChrwParams& cp) {
  const double b = cp.B1_eff;
  const double dq = params.Q - params.omega;
  const double w = params.omega - cp.j0_2 * params.Q;
  return 2.0 * params.B0 * params.B0 * (cp.j0_1 * cp.j0_1 + cp.j1_1 * cp.j1_1) -
         2.0 * b * b * (1.0 - cp.xi) * (1.0 - cp.xi) + 0.5 * w * w + dq * dq / 6.0;
}

namespace {

ChrwParams three_level_dressing(const SpinParams& params, const ChrwOptions& opts) {
  const double b = std::sqrt(params.spin.value() * (params.spin.value() + 1.0) / 2.0) * params.B1;
  if (opts.forced_xi) return chrw_params_at(params.Q, b, params.omega, *opts.forced_xi);
  return solve_xi(params.Q, b, params.omega);
}

}  // namespace

ChrwThreeLevel::ChrwThreeLevel(const SpinParams& params, const ChrwOptions& opts)
    : params_(params),
      cp_(three_level_dressing(params, opts)),
      heff_(chrw_three_level_heff(params, cp_)),
      evo_(heff_) {}

ComplexMatrix ChrwThreeLevel::at(double t) const {
  const double phi = cp_.B1_eff / params_.omega * cp_.xi * std::sin(params_.omega * t);
  return exp_sx_spin_one(phi) * sz2_phase(params_.omega, t) * evo_.at(t);
}

ComplexMatrix ChrwThreeLevel::explicit_at(double t, double u) const {
  const Su3ClosedForm form = make_su3_form(heff_, u);
  const double phi = cp_.B1_eff / params_.omega * cp_.xi * std::sin(params_.omega * t);
  return exp_sx_spin_one(phi) * sz2_phase(params_.omega, t) * form.exponential(t);
}

ChrwCrossCheck ChrwThreeLevel::cross_check(double t) const {
  ChrwCrossCheck out;
  out.u_formula = chrw_three_level_formula_u(params_, cp_);
  out.u_trace = su3_trace_normalisation(heff_);
  const ComplexMatrix ref = at(t);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto residual = [&](double u) {
    if (!(u > 0.0)) return nan;
    try {
      return max_abs(explicit_at(t, u) - ref);
    } catch (const NumericalError&) {
      return nan;
    }
  };
  out.residual_formula_u = residual(out.u_formula);
  out.residual_trace_u = residual(out.u_trace);
  out.fallback = !(out.residual_formula_u <= 1e-6);
  return out;
}

ComplexMatrix chrw_three_level_propagator(const SpinParams& params, double t) { return ChrwThreeLevel(params).at(t); }

ChrwTwoLevel::ChrwTwoLevel(const ReducedBlockSpec& spec, Side side, const SpinParams& params,
                           const ChrwOptions& opts)
    : omega_(params.omega), side_(side) {
  if (spec.kind == BlockKind::CentralThreeLevel) {
    throw PreconditionError("ChrwTwoLevel: the block is three-level");
  }
  const double omega0 = block_omega0(spec, side);
  cp_ = opts.forced_xi ? chrw_params_at(omega0, spec.B1_eff, omega_, *opts.forced_xi)
                       : solve_xi(omega0, spec.B1_eff, omega_);
  heff_ = (0.5 * omega0 * cp_.j0_2 - 0.5 * omega_) * pauli_z() + cp_.B_renorm * pauli_x();
}

ComplexMatrix ChrwTwoLevel::at(double t) const {
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  const double phi = cp_.B1_eff / omega_ * cp_.xi * std::sin(omega_ * t);
  const ComplexMatrix dress = std::cos(phi) * id - Complex(0.0, std::sin(phi)) * pauli_x();
  const ComplexMatrix frame = std::cos(omega_ * t / 2.0) * id - Complex(0.0, std::sin(omega_ * t / 2.0)) * pauli_z();
  const ComplexMatrix evo = two_level_exp(heff_(0, 0).real(), heff_(0, 1).real(), t);
  const ComplexMatrix plus = dress * frame * evo;
  if (side_ == Side::Plus) return plus;
  const ComplexMatrix sx = pauli_x();
  return sx * plus * sx;
}

ComplexMatrix chrw_two_level_propagator(const ReducedBlockSpec& spec, Side side, const SpinParams& params, double t,
                                        const ChrwOptions& opts) {
  return ChrwTwoLevel(spec, side, params, opts).at(t);
}

ChrwAssembled::ChrwAssembled(const SpinParams& params, const ChrwOptions& opts)
    : ChrwAssembled(params, select_block(params), opts) {}

ChrwAssembled::ChrwAssembled(const SpinParams& params, ReducedBlockSpec spec, const ChrwOptions& opts)
    : params_(params), spec_(std::move(spec)) {
  params_.validate();
  if (spec_.kind == BlockKind::CentralThreeLevel) {
    three_.emplace(params_, opts);
    for (const auto& w : three_->dressing().warnings) spec_.warnings.push_back(w);
  } else {
    for (Side side : active_sides(spec_)) {
      two_.emplace_back(spec_, side, params_, opts);
      for (const auto& w : two_.back().dressing().warnings) spec_.warnings.push_back(w);
    }
  }
}

Propagator ChrwAssembled::at(double t) const {
  const auto sides = active_sides(spec_);
  const BlockFunction block = [&](const ReducedBlockSpec&, Side side, double time) -> ComplexMatrix {
    if (three_) return three_->at(time);
    for (std::size_t k = 0; k < sides.size(); ++k) {
      if (sides[k] == side) return two_[k].at(time);
    }
    throw std::logic_error("ChrwAssembled: inactive side requested");
  };
  Propagator out = assemble_reduced(params_, spec_, t, block);
  out.method = "chrw";
  if (three_) {
    out.diagnostics["xi"] = three_->dressing().xi;
    out.diagnostics["B_renorm"] = three_->dressing().B_renorm;
  } else if (!two_.empty()) {
    out.diagnostics["xi"] = two_.front().dressing().xi;
    out.diagnostics["B_renorm"] = two_.front().dressing().B_renorm;
  }
  return out;
}

Propagator assemble_chrw(const SpinParams& params, const ReducedBlockSpec& spec, double t) {
  return ChrwAssembled(params, spec).at(t);
}

}  // namespace spinrwa
