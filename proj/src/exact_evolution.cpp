#include "spinrwa/exact_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spinrwa/errors.hpp"

namespace spinrwa {

double max_frequency(const SpinParams& params) {
  return std::max(std::abs(params.omega), (params.spin.twice() - 1) * params.Q + params.B0);
}

double default_dt(const SpinParams& params) {
  return (2.0 * std::numbers::pi / max_frequency(params)) / 200.0;
}

double resolve_dt(const SpinParams& params, const ExactSolverConfig& cfg) {
  if (cfg.dt <= 0.0) return default_dt(params);
  const double limit = (2.0 * std::numbers::pi / max_frequency(params)) / 100.0;
  if (cfg.dt > limit && !cfg.allow_large_step) {
    throw ConfigError("rk4: dt = " + std::to_string(cfg.dt) + " exceeds (2 pi / w_max) / 100 = " +
                      std::to_string(limit));
  }
  return cfg.dt;
}

ComplexMatrix lab_hamiltonian(const SpinParams& params, double t) {
  const SpinOperators ops = spin_matrices(params.spin);
  return params.Q * ops.z * ops.z + params.B0 * ops.z + params.B1 * std::cos(params.omega * t) * ops.x;
}

namespace {

// Integrates either the lab-frame equation or, by default, the interaction
// picture with respect to the diagonal H0 = Q Iz^2 + B0 Iz, where
// U = e^{-i H0 t} U_I and i dU_I/dt = e^{i H0 t} V(t) e^{-i H0 t} U_I. The
// static part is then exact and the step error scales with the drive.
class Rk4Integrator {
public:
  Rk4Integrator(const SpinParams& params, const ExactSolverConfig& cfg)
      : params_(params), cfg_(cfg), dt_(resolve_dt(params, cfg)) {
    const SpinOperators ops = spin_matrices(params.spin);
    static_part_ = params.Q * ops.z * ops.z + params.B0 * ops.z;
    energies_ = static_part_.diagonal().real();
    drive_ = params.B1 * ops.x;
    u_ = ComplexMatrix::Identity(ops.z.rows(), ops.z.cols());
  }

  void advance_to(double target) {
    if (target < t_) throw PreconditionError("rk4: sample times must be non-decreasing");
    const double span = target - t_;
    if (span <= 0.0) return;
    const auto n = static_cast<long long>(std::max(1.0, std::ceil(span / dt_ - 1e-9)));
    for (long long k = 0; k + 1 < n; ++k) step(dt_);
    step(target - t_);
    t_ = target;
  }

  ComplexMatrix state() const {
    if (!cfg_.interaction_frame) return u_;
    ComplexMatrix out = u_;
    for (Eigen::Index r = 0; r < out.rows(); ++r) out.row(r) *= std::polar(1.0, -energies_(r) * t_);
    return out;
  }

private:
  ComplexMatrix rhs(double t, const ComplexMatrix& u) const {
    if (!cfg_.interaction_frame) {
      const ComplexMatrix h = static_part_ + std::cos(params_.omega * t) * drive_;
      return Complex(0.0, -1.0) * (h * u);
    }
    const Eigen::Index n = u.rows();
    ComplexVector phase(n);
    for (Eigen::Index k = 0; k < n; ++k) phase(k) = std::polar(1.0, energies_(k) * t);
    const ComplexMatrix v =
        std::cos(params_.omega * t) * (phase.asDiagonal() * drive_ * phase.conjugate().asDiagonal());
    return Complex(0.0, -1.0) * (v * u);
  }

  void step(double h) {
    const ComplexMatrix k1 = rhs(t_, u_);
    const ComplexMatrix k2 = rhs(t_ + 0.5 * h, u_ + (0.5 * h) * k1);
    const ComplexMatrix k3 = rhs(t_ + 0.5 * h, u_ + (0.5 * h) * k2);
    const ComplexMatrix k4 = rhs(t_ + h, u_ + h * k3);
    u_ += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t_ += h;
    ++steps_;
    if (cfg_.renormalize && cfg_.renorm_interval > 0 && steps_ % cfg_.renorm_interval == 0) {
      u_ = polar_unitary(u_);
    }
  }

  SpinParams params_;
  ExactSolverConfig cfg_;
  double dt_;
  ComplexMatrix static_part_;
  RealVector energies_;
  ComplexMatrix drive_;
  ComplexMatrix u_;
  double t_ = 0.0;
  long long steps_ = 0;
};

}  // namespace

Propagator rk4_propagator(const SpinParams& params, double t_final, const ExactSolverConfig& cfg) {
  params.validate();
  if (t_final < 0.0) throw PreconditionError("rk4_propagator: t_final must be >= 0");
  Rk4Integrator integrator(params, cfg);
  integrator.advance_to(t_final);
  Propagator out;
  out.matrix = integrator.state();
  out.time = t_final;
  out.method = "exact";
  out.diagnostics["dt"] = resolve_dt(params, cfg);
  return out;
}

std::vector<ComplexMatrix> rk4_checkpoints(const SpinParams& params, std::span<const double> times,
                                           const ExactSolverConfig& cfg) {
  params.validate();
  Rk4Integrator integrator(params, cfg);
  std::vector<ComplexMatrix> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t < 0.0) throw PreconditionError("rk4_checkpoints: negative sample time");
    integrator.advance_to(t);
    out.push_back(integrator.state());
  }
  return out;
}

SpinVectorSample spin_vector_closed(Spin spin, double Q, double t) {
  const double i = spin.value();
  return {t, i * std::pow(std::cos(Q * t), spin.twice() - 1), 0.0, 0.0};
}

namespace {

double binomial(int n, int k) {
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return c;
}

}  // namespace

std::vector<RotatingTerm> spin_vector_decomposition(Spin spin, double Q) {
  // I cos^n(x), n = 2I - 1, expanded in cos((n - 2k) x); each cosine splits
  // into a clockwise and a counterclockwise unit vector of half weight.
  const int n = spin.twice() - 1;
  const double i = spin.value();
  const double scale = i / std::ldexp(1.0, n);  // I / 2^{2I-1}
  std::vector<RotatingTerm> terms;
  for (int k = 0; 2 * k < n; ++k) {
    const double w = (n - 2 * k) * Q;
    const double c = scale * binomial(n, k);
    terms.push_back({w, c, Chirality::Clockwise});
    terms.push_back({w, c, Chirality::Counterclockwise});
  }
  if (n % 2 == 0) {
    terms.push_back({0.0, scale * binomial(n, n / 2), Chirality::Static});
  }
  return terms;
}

SpinVectorSample resum(std::span<const RotatingTerm> terms, double t) {
  SpinVectorSample s{t, 0.0, 0.0, 0.0};
  for (const auto& term : terms) {
    const double c = std::cos(term.frequency * t);
    const double sn = std::sin(term.frequency * t);
    switch (term.chirality) {
      case Chirality::Static:
        s.vx += term.weight;
        break;
      case Chirality::Clockwise:
        s.vx += term.weight * c;
        s.vy += term.weight * sn;
        break;
      case Chirality::Counterclockwise:
        s.vx += term.weight * c;
        s.vy -= term.weight * sn;
        break;
    }
  }
  return s;
}

}  // namespace spinrwa
