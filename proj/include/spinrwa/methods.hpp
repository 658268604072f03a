#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spinrwa/exact_evolution.hpp"
#include "spinrwa/propagator.hpp"
#include "spinrwa/spin_algebra.hpp"

namespace spinrwa {

enum class Method { Exact, RwaZeeman, RwaReduced, RwaFull, Chrw };

/// CLI names: exact, rwa-zeeman, rwa-reduced, rwa-full, chrw.
Method parse_method(std::string_view name);
std::string method_name(Method m);
/// Comma-separated list; empty entries and unknown names raise ConfigError.
std::vector<Method> parse_method_list(std::string_view csv);

struct EvaluatorOptions {
  /// Pins the reduced block instead of choosing the nearest transition.
  std::optional<double> M_target;
  ExactSolverConfig solver;
};

/// Propagator source for one method at one parameter point.
class Evaluator {
public:
  virtual ~Evaluator() = default;
  virtual Propagator at(double t) const = 0;
};

std::unique_ptr<Evaluator> make_evaluator(Method m, const SpinParams& params, const EvaluatorOptions& opts = {});

/// "M=<m>" (m may be "3/2" or "-1") selects |I,M>; "x" selects the I_x
/// eigenstate e^{-i (pi/2) I_y}|I,I>; "auto" is M=0 for integer spin and
/// M=1/2 otherwise.
ComplexVector parse_initial_state(std::string_view text, Spin spin);

}  // namespace spinrwa
