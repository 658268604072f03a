#pragma once

#include <string>
#include <vector>

#include "spinrwa/linalg.hpp"
#include "spinrwa/methods.hpp"
#include "spinrwa/spin_algebra.hpp"

namespace spinrwa {

/// F = |Tr(A^dag B) / N|^2
double operator_fidelity(const ComplexMatrix& u_approx, const ComplexMatrix& u_exact);
/// f = |<a|b>|; both vectors must be normalised to 1e-8.
double state_fidelity(const ComplexVector& a, const ComplexVector& b);

struct PiTime {
  double value = 0.0;
};

/// pi / sqrt(I(I+1) B1^2 / 2 + (Q - w)^2)
PiTime t_pi(const SpinParams& params);

struct FidelityTrace {
  std::string method;
  std::vector<double> times;           // units of 1/Q
  std::vector<double> times_over_tpi;  // units of T_pi
  std::vector<double> f_state;
  std::vector<double> F_op;
  ComplexVector initial_state;
  /// Non-empty when the method failed; the fidelity columns are then NaN.
  std::string error;
  std::vector<std::string> warnings;
};

struct TraceOptions {
  EvaluatorOptions evaluator;
};

/// Samples every method on t_k = k t_max / n, k = 1..n, with t_max =
/// t_max_pi * T_pi, against one shared RK4 reference pass. A failing method
/// yields a NaN trace with `error` set; the others are unaffected.
std::vector<FidelityTrace> trace_methods(const SpinParams& params, const std::vector<Method>& methods,
                                         double t_max_pi, int n_samples, const ComplexVector& initial_state,
                                         const TraceOptions& opts = {});

enum class Metric { Operator, State };

/// Mean of the chosen metric over samples with t <= window T_pi.
double window_average(const FidelityTrace& trace, Metric metric, double window_pi = 20.0);

}  // namespace spinrwa
