#include "spinrwa/fidelity.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "spinrwa/errors.hpp"
#include "spinrwa/exact_evolution.hpp"

namespace spinrwa {

double operator_fidelity(const ComplexMatrix& u_approx, const ComplexMatrix& u_exact) {
  if (u_approx.rows() != u_exact.rows() || u_approx.cols() != u_exact.cols() || u_approx.rows() != u_approx.cols()) {
    throw PreconditionError("operator_fidelity: dimension mismatch");
  }
  const double n = static_cast<double>(u_approx.rows());
  const Complex tr = (u_approx.adjoint() * u_exact).trace() / n;
  return std::norm(tr);
}

double state_fidelity(const ComplexVector& a, const ComplexVector& b) {
  if (a.size() != b.size()) throw PreconditionError("state_fidelity: dimension mismatch");
  if (std::abs(a.norm() - 1.0) > 1e-8 || std::abs(b.norm() - 1.0) > 1e-8) {
    throw PreconditionError("state_fidelity: states must be normalised");
  }
  return std::abs(a.dot(b));
}

PiTime t_pi(const SpinParams& params) {
  const double i = params.spin.value();
  const double dq = params.Q - params.omega;
  const double denom = 0.5 * i * (i + 1.0) * params.B1 * params.B1 + dq * dq;
  if (!(denom > 0.0)) throw DomainError("t_pi: undefined for B1 = 0 at w = Q");
  return PiTime{std::numbers::pi / std::sqrt(denom)};
}

std::vector<FidelityTrace> trace_methods(const SpinParams& params, const std::vector<Method>& methods,
                                         double t_max_pi, int n_samples, const ComplexVector& initial_state,
                                         const TraceOptions& opts) {
  if (n_samples < 2) throw PreconditionError("trace_methods: n_samples must be >= 2");
  if (!(t_max_pi > 0.0)) throw PreconditionError("trace_methods: t_max must be positive");
  if (initial_state.size() != params.spin.dim()) {
    throw PreconditionError("trace_methods: initial state has the wrong dimension");
  }
  const double tpi = t_pi(params).value;
  const double t_max = t_max_pi * tpi;
  std::vector<double> times(static_cast<std::size_t>(n_samples));
  std::vector<double> over(times.size());
  for (int k = 1; k <= n_samples; ++k) {
    over[static_cast<std::size_t>(k - 1)] = static_cast<double>(k) * t_max_pi / n_samples;
    times[static_cast<std::size_t>(k - 1)] = static_cast<double>(k) * t_max / n_samples;
  }
  const std::vector<ComplexMatrix> ref = rk4_checkpoints(params, times, opts.evaluator.solver);
  std::vector<ComplexVector> ref_states;
  ref_states.reserve(ref.size());
  for (const auto& u : ref) ref_states.push_back(u * initial_state);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<FidelityTrace> out;
  for (Method m : methods) {
    FidelityTrace tr;
    tr.method = method_name(m);
    tr.times = times;
    tr.times_over_tpi = over;
    tr.initial_state = initial_state;
    tr.f_state.assign(times.size(), nan);
    tr.F_op.assign(times.size(), nan);
    try {
      if (m == Method::Exact) {
        tr.f_state.assign(times.size(), 1.0);
        tr.F_op.assign(times.size(), 1.0);
      } else {
        const auto eval = make_evaluator(m, params, opts.evaluator);
        for (std::size_t k = 0; k < times.size(); ++k) {
          const Propagator p = eval->at(times[k]);
          if (k == 0) tr.warnings = p.warnings;
          ComplexVector psi = p.matrix * initial_state;
          tr.F_op[k] = operator_fidelity(p.matrix, ref[k]);
          tr.f_state[k] = std::abs(psi.dot(ref_states[k])) / (psi.norm() * ref_states[k].norm());
        }
      }
    } catch (const std::exception& e) {
      tr.f_state.assign(times.size(), nan);
      tr.F_op.assign(times.size(), nan);
      tr.error = e.what();
    }
    out.push_back(std::move(tr));
  }
  return out;
}

double window_average(const FidelityTrace& trace, Metric metric, double window_pi) {
  const auto& v = metric == Metric::Operator ? trace.F_op : trace.f_state;
  if (v.empty()) throw PreconditionError("window_average: empty trace");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!trace.times_over_tpi.empty() && trace.times_over_tpi[k] > window_pi * (1.0 + 1e-12)) continue;
    sum += v[k];
    ++count;
  }
  if (count == 0) throw PreconditionError("window_average: no samples inside the window");
  return sum / static_cast<double>(count);
}

}  // namespace spinrwa
