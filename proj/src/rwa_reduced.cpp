#include "spinrwa/rwa_reduced.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "spinrwa/errors.hpp"

namespace spinrwa {

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

namespace {

double level_energy(const SpinParams& p, double m) { return p.Q * m * m + p.B0 * m; }

Eigen::Index level_index(const SpinParams& p, double m) {
  return static_cast<Eigen::Index>(std::lround(p.spin.value() - m));
}

bool is_two_level(BlockKind kind) { return kind != BlockKind::CentralThreeLevel; }

// e^{-i w sigma_z t/2} e^{-i [(w0 - w)/2 sigma_z + (b/2) sigma_x] t}
ComplexMatrix plus_two_level(double omega0, double b, double omega, double t) {
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  const ComplexMatrix frame = std::cos(omega * t / 2.0) * id - Complex(0.0, std::sin(omega * t / 2.0)) * pauli_z();
  const ComplexMatrix heff = 0.5 * (omega0 - omega) * pauli_z() + 0.5 * b * pauli_x();
  const double a = std::hypot(0.5 * (omega0 - omega), 0.5 * b);
  ComplexMatrix evo = id;
  if (a > 0.0) {
    evo = std::cos(a * t) * id - Complex(0.0, std::sin(a * t) / a) * heff;
  }
  return frame * evo;
}

}  // namespace

ReducedBlockSpec make_block(const SpinParams& params, double M_target) {
  const Spin spin = params.spin;
  const double twice_m = 2.0 * M_target;
  const long twice = std::lround(twice_m);
  if (std::abs(twice_m - static_cast<double>(twice)) > 1e-9 || twice < 1 || twice > spin.twice() ||
      (twice - spin.twice()) % 2 != 0) {
    throw PreconditionError("make_block: M_target = " + std::to_string(M_target) +
                            " is not a level with M >= 1/2 of spin " + spin.to_string());
  }
  ReducedBlockSpec spec;
  spec.M_target = 0.5 * static_cast<double>(twice);
  const double i = spin.value();
  const double m = spec.M_target;
  if (twice == 1) {
    spec.kind = BlockKind::CentralTwoLevelHalf;
  } else if (twice == 2) {
    spec.kind = BlockKind::CentralThreeLevel;
  } else {
    spec.kind = BlockKind::TwoLevelPair;
  }
  spec.omega0_plus = (2.0 * m - 1.0) * params.Q + params.B0;
  spec.omega0_minus = (2.0 * m - 1.0) * params.Q - params.B0;
  if (spec.kind == BlockKind::CentralThreeLevel) {
    spec.B1_eff = std::sqrt(i * (i + 1.0) / 2.0) * params.B1;
  } else {
    spec.B1_eff = 0.5 * params.B1 * std::sqrt((i + m) * (i - m + 1.0));
  }
  const double detuning = std::abs(params.omega - spec.omega0_plus);
  if (detuning > params.Q) {
    spec.warnings.push_back("detuning " + std::to_string(detuning) +
                            " exceeds half the spacing to the neighbouring transition");
  }
  return spec;
}

ReducedBlockSpec select_block(const SpinParams& params) {
  params.validate();
  const double first = params.spin.is_integer() ? 1.0 : 0.5;
  double best_m = first;
  double best_d = std::abs(params.omega - ((2.0 * first - 1.0) * params.Q + params.B0));
  for (double m = first + 1.0; m <= params.spin.value() + 1e-9; m += 1.0) {
    const double d = std::abs(params.omega - ((2.0 * m - 1.0) * params.Q + params.B0));
    if (d < best_d - 1e-12) {
      best_d = d;
      best_m = m;
    }
  }
  return make_block(params, best_m);
}

std::vector<Side> active_sides(const ReducedBlockSpec& spec) {
  if (spec.kind == BlockKind::TwoLevelPair) return {Side::Plus, Side::Minus};
  return {Side::Plus};
}

double block_omega0(const ReducedBlockSpec& spec, Side side) {
  return side == Side::Plus ? spec.omega0_plus : spec.omega0_minus;
}

std::vector<Eigen::Index> block_indices(const SpinParams& params, const ReducedBlockSpec& spec, Side side) {
  const double m = spec.M_target;
  switch (spec.kind) {
    case BlockKind::CentralThreeLevel:
      return {level_index(params, 1.0), level_index(params, 0.0), level_index(params, -1.0)};
    case BlockKind::CentralTwoLevelHalf:
      return {level_index(params, 0.5), level_index(params, -0.5)};
    case BlockKind::TwoLevelPair:
      if (side == Side::Plus) return {level_index(params, m), level_index(params, m - 1.0)};
      return {level_index(params, -m + 1.0), level_index(params, -m)};
  }
  return {};
}

ComplexMatrix two_level_block_propagator(const ReducedBlockSpec& spec, Side side, const SpinParams& params,
                                         double t) {
  if (spec.kind == BlockKind::CentralThreeLevel) {
    throw PreconditionError("two_level_block_propagator: block is three-level");
  }
  if (spec.kind == BlockKind::CentralTwoLevelHalf && side == Side::Minus) {
    throw PreconditionError("two_level_block_propagator: central half block has no minus side");
  }
  if (side == Side::Plus) return plus_two_level(spec.omega0_plus, spec.B1_eff, params.omega, t);
  const ComplexMatrix sx = pauli_x();
  return sx * plus_two_level(spec.omega0_minus, spec.B1_eff, params.omega, t) * sx;
}

ComplexMatrix TwoLevelClosedForm::matrix() const {
  const Complex mi(0.0, -1.0);
  return tau0 * ComplexMatrix::Identity(2, 2) + mi * (taux / 2.0) * pauli_x() + mi * (tauy / 2.0) * pauli_y() +
         mi * (tauz / 2.0) * pauli_z();
}

TwoLevelClosedForm two_level_tau_form(double omega0, double B1_eff, double omega, double t) {
  TwoLevelClosedForm f;
  f.Delta = omega0 - omega;
  f.Omega = std::hypot(f.Delta, B1_eff) / 2.0;
  const double c = std::cos(omega * t / 2.0);
  const double s = std::sin(omega * t / 2.0);
  const double cw = std::cos(f.Omega * t);
  // sin(Omega t)/Omega, continuous at Omega = 0
  const double sinc = f.Omega > 0.0 ? std::sin(f.Omega * t) / f.Omega : t;
  f.tau0 = c * cw - f.Delta / 2.0 * s * sinc;
  f.taux = B1_eff * sinc * c;
  f.tauy = B1_eff * sinc * s;
  f.tauz = f.Delta * sinc * c + 2.0 * cw * s;
  return f;
}

double su3_trace_normalisation(const ComplexMatrix& h) {
  const ComplexMatrix h0 = h - (h.trace() / 3.0) * ComplexMatrix::Identity(3, 3);
  return (h0 * h0).trace().real();
}

Su3ClosedForm make_su3_form(const ComplexMatrix& h, double u) {
  if (h.rows() != 3 || h.cols() != 3) throw PreconditionError("make_su3_form: generator must be 3x3");
  if (!(u > 0.0)) throw PreconditionError("make_su3_form: u must be > 0");
  Su3ClosedForm f;
  f.u = u;
  f.shift = h.trace().real() / 3.0;
  f.Hcal = std::sqrt(2.0 / u) * (h - f.shift * ComplexMatrix::Identity(3, 3));
  double x = 1.5 * std::sqrt(3.0) * f.Hcal.determinant().real();
  if (std::abs(x) > 1.0 + 1e-10) {
    throw NumericalError("make_su3_form: arccos argument outside [-1, 1]", std::abs(x) - 1.0);
  }
  x = std::clamp(x, -1.0, 1.0);
  f.alpha = (std::acos(x) - std::numbers::pi / 2.0) / 3.0;
  return f;
}

ComplexMatrix Su3ClosedForm::exponential(double t) const {
  const ComplexMatrix id = ComplexMatrix::Identity(3, 3);
  const ComplexMatrix h2 = Hcal * Hcal;
  const double scale = std::sqrt(2.0 * u / 3.0);
  ComplexMatrix out = ComplexMatrix::Zero(3, 3);
  for (int k = 0; k < 3; ++k) {
    const double a = alpha + 2.0 * std::numbers::pi * k / 3.0;
    const double denom = 1.0 - 2.0 * std::cos(2.0 * a);
    if (std::abs(denom) < 1e-7) {
      throw NumericalError("Su3ClosedForm: degenerate spectrum", std::abs(denom));
    }
    const ComplexMatrix projector =
        h2 + (2.0 * std::sin(a) / std::sqrt(3.0)) * Hcal - ((1.0 + 2.0 * std::cos(2.0 * a)) / 3.0) * id;
    out += projector * (std::polar(1.0, -t * scale * std::sin(a)) / denom);
  }
  return std::polar(1.0, -shift * t) * out;
}

namespace {

ComplexMatrix spin_one_sz2() {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(0, 0) = 1.0;
  m(2, 2) = 1.0;
  return m;
}

// R = (e^{-i w t} - 1) Sz^2 + 1 = e^{-i w Sz^2 t}
ComplexMatrix sz2_frame(double omega, double t) {
  ComplexMatrix r = ComplexMatrix::Identity(3, 3);
  r(0, 0) = std::polar(1.0, -omega * t);
  r(2, 2) = r(0, 0);
  return r;
}

}  // namespace

ComplexMatrix three_level_rwa_heff(const SpinParams& params) {
  const SpinOperators s = spin_matrices(Spin::from_twice(2));
  const double i = params.spin.value();
  const double b1p = std::sqrt(i * (i + 1.0) / 2.0) * params.B1;
  return (params.Q - params.omega) * spin_one_sz2() + params.B0 * s.z + (b1p / 2.0) * s.x;
}

double three_level_rwa_u(const SpinParams& params) {
  const double i = params.spin.value();
  const double b1p = std::sqrt(i * (i + 1.0) / 2.0) * params.B1;
  const double det = params.Q - params.omega;
  return 2.0 * params.B0 * params.B0 + b1p * b1p / 2.0 + 2.0 * det * det / 3.0;
}

namespace {

// e^{-i H t} for the 3x3 block through the closed form, spectral when the
// closed form is unavailable (u = 0 or a degenerate spectrum).
ComplexMatrix su3_or_spectral(const ComplexMatrix& heff, double u, double t) {
  if (u <= 1e-28) {
    return std::polar(1.0, -heff.trace().real() / 3.0 * t) * ComplexMatrix::Identity(3, 3);
  }
  try {
    return make_su3_form(heff, u).exponential(t);
  } catch (const NumericalError&) {
    return expm_unitary(heff, t);
  }
}

}  // namespace

ComplexMatrix three_level_su3_propagator(const SpinParams& params, double t) {
  const ComplexMatrix heff = three_level_rwa_heff(params);
  return sz2_frame(params.omega, t) * su3_or_spectral(heff, three_level_rwa_u(params), t);
}

Propagator assemble_reduced(const SpinParams& params, const ReducedBlockSpec& spec, double t,
                            const BlockFunction& block_method) {
  const auto m = m_values(params.spin);
  const Eigen::Index n = params.spin.dim();
  ComplexMatrix u = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    u(k, k) = std::polar(1.0, -level_energy(params, m[static_cast<std::size_t>(k)]) * t);
  }
  std::set<Eigen::Index> used;
  for (Side side : active_sides(spec)) {
    const auto idx = block_indices(params, spec, side);
    for (auto k : idx) {
      if (k < 0 || k >= n || !used.insert(k).second) {
        throw std::logic_error("assemble_reduced: overlapping or out-of-range block index");
      }
    }
    ComplexMatrix block = block_method(spec, side, t);
    if (block.rows() != static_cast<Eigen::Index>(idx.size()) || block.cols() != block.rows()) {
      throw PreconditionError("assemble_reduced: block propagator has the wrong dimension");
    }
    if (is_two_level(spec.kind)) {
      const double upper = m[static_cast<std::size_t>(idx[0])];
      const double lower = m[static_cast<std::size_t>(idx[1])];
      const double offset = 0.5 * (level_energy(params, upper) + level_energy(params, lower));
      block *= std::polar(1.0, -offset * t);
    }
    for (std::size_t r = 0; r < idx.size(); ++r) {
      for (std::size_t c = 0; c < idx.size(); ++c) {
        u(idx[r], idx[c]) = block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
    }
  }
  Propagator out;
  out.matrix = std::move(u);
  out.time = t;
  out.method = "rwa-reduced";
  out.diagnostics["M_target"] = spec.M_target;
  out.warnings = spec.warnings;
  return out;
}

ReducedRwa::ReducedRwa(const SpinParams& params) : ReducedRwa(params, select_block(params)) {}

ReducedRwa::ReducedRwa(const SpinParams& params, ReducedBlockSpec spec) : params_(params), spec_(std::move(spec)) {
  params_.validate();
  if (spec_.kind == BlockKind::CentralThreeLevel) {
    heff3_ = three_level_rwa_heff(params_);
    const double u = three_level_rwa_u(params_);
    if (u > 1e-28) {
      try {
        su3_ = make_su3_form(heff3_, u);
        su3_.exponential(0.0);
        su3_ok_ = true;
      } catch (const NumericalError&) {
        su3_ok_ = false;
      }
    }
  }
}

Propagator ReducedRwa::at(double t) const {
  const BlockFunction block = [this](const ReducedBlockSpec& spec, Side side, double time) -> ComplexMatrix {
    if (spec.kind == BlockKind::CentralThreeLevel) {
      const ComplexMatrix evo =
          su3_ok_ ? su3_.exponential(time) : su3_or_spectral(heff3_, three_level_rwa_u(params_), time);
      return sz2_frame(params_.omega, time) * evo;
    }
    return two_level_block_propagator(spec, side, params_, time);
  };
  return assemble_reduced(params_, spec_, t, block);
}

ZeemanRwa::ZeemanRwa(const SpinParams& params)
    : params_(params),
      frame_(params.omega * spin_matrices(params.spin).z),
      heff_([&] {
        const SpinOperators ops = spin_matrices(params.spin);
        return ComplexMatrix((params.B0 - params.omega) * ops.z + params.Q * ops.z * ops.z + (params.B1 / 2.0) * ops.x);
      }()) {
  params_.validate();
}

Propagator ZeemanRwa::at(double t) const {
  Propagator out;
  out.matrix = frame_.at(t) * heff_.at(t);
  out.time = t;
  out.method = "rwa-zeeman";
  return out;
}

Propagator zeeman_rwa_propagator(const SpinParams& params, double t) { return ZeemanRwa(params).at(t); }

}  // namespace spinrwa
