#include "spinrwa/methods.hpp"

#include <charconv>
#include <cmath>

#include "spinrwa/chrw.hpp"
#include "spinrwa/errors.hpp"
#include "spinrwa/rwa_full.hpp"
#include "spinrwa/rwa_reduced.hpp"

namespace spinrwa {

Method parse_method(std::string_view name) {
  if (name == "exact") return Method::Exact;
  if (name == "rwa-zeeman") return Method::RwaZeeman;
  if (name == "rwa-reduced") return Method::RwaReduced;
  if (name == "rwa-full") return Method::RwaFull;
  if (name == "chrw") return Method::Chrw;
  throw ConfigError("unknown method '" + std::string(name) +
                    "' (expected exact, rwa-zeeman, rwa-reduced, rwa-full or chrw)");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Exact: return "exact";
    case Method::RwaZeeman: return "rwa-zeeman";
    case Method::RwaReduced: return "rwa-reduced";
    case Method::RwaFull: return "rwa-full";
    case Method::Chrw: return "chrw";
  }
  return "?";
}

std::vector<Method> parse_method_list(std::string_view csv) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t end = std::min(csv.find(',', start), csv.size());
    const std::string_view item = csv.substr(start, end - start);
    if (item.empty()) throw ConfigError("empty entry in method list '" + std::string(csv) + "'");
    out.push_back(parse_method(item));
    start = end + 1;
  }
  return out;
}

namespace {

class ExactEval final : public Evaluator {
public:
  ExactEval(const SpinParams& p, const ExactSolverConfig& cfg) : params_(p), cfg_(cfg) {}
  Propagator at(double t) const override { return rk4_propagator(params_, t, cfg_); }

private:
  SpinParams params_;
  ExactSolverConfig cfg_;
};

class ZeemanEval final : public Evaluator {
public:
  explicit ZeemanEval(const SpinParams& p) : impl_(p) {}
  Propagator at(double t) const override { return impl_.at(t); }

private:
  ZeemanRwa impl_;
};

ReducedBlockSpec block_for(const SpinParams& p, const EvaluatorOptions& opts) {
  return opts.M_target ? make_block(p, *opts.M_target) : select_block(p);
}

class ReducedEval final : public Evaluator {
public:
  ReducedEval(const SpinParams& p, const EvaluatorOptions& opts) : impl_(p, block_for(p, opts)) {}
  Propagator at(double t) const override { return impl_.at(t); }

private:
  ReducedRwa impl_;
};

class FullIntEval final : public Evaluator {
public:
  explicit FullIntEval(const SpinParams& p) : impl_(p) {}
  Propagator at(double t) const override { return impl_.at(t); }

private:
  FullRwaInteger impl_;
};

class FullHalfEval final : public Evaluator {
public:
  explicit FullHalfEval(const SpinParams& p) : impl_(p) {}
  Propagator at(double t) const override { return impl_.at(t); }

private:
  FullRwaHalfInteger impl_;
};

class ChrwEval final : public Evaluator {
public:
  ChrwEval(const SpinParams& p, const EvaluatorOptions& opts) : impl_(p, block_for(p, opts)) {}
  Propagator at(double t) const override { return impl_.at(t); }

private:
  ChrwAssembled impl_;
};

double parse_number(std::string_view s) {
  const auto slash = s.find('/');
  auto one = [](std::string_view part) {
    double v = 0.0;
    const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || res.ec != std::errc() || res.ptr != part.data() + part.size()) {
      throw ConfigError("cannot parse number '" + std::string(part) + "'");
    }
    return v;
  };
  if (slash == std::string_view::npos) return one(s);
  const double den = one(s.substr(slash + 1));
  if (den == 0.0) throw ConfigError("zero denominator in '" + std::string(s) + "'");
  return one(s.substr(0, slash)) / den;
}

}  // namespace

std::unique_ptr<Evaluator> make_evaluator(Method m, const SpinParams& params, const EvaluatorOptions& opts) {
  params.validate();
  switch (m) {
    case Method::Exact: return std::make_unique<ExactEval>(params, opts.solver);
    case Method::RwaZeeman: return std::make_unique<ZeemanEval>(params);
    case Method::RwaReduced: return std::make_unique<ReducedEval>(params, opts);
    case Method::RwaFull:
      if (params.spin.is_integer()) return std::make_unique<FullIntEval>(params);
      return std::make_unique<FullHalfEval>(params);
    case Method::Chrw: return std::make_unique<ChrwEval>(params, opts);
  }
  throw PreconditionError("make_evaluator: unknown method");
}

ComplexVector parse_initial_state(std::string_view text, Spin spin) {
  const Eigen::Index n = spin.dim();
  ComplexVector psi = ComplexVector::Zero(n);
  if (text == "x") {
    const auto c = rotated_coeffs(spin);
    for (Eigen::Index k = 0; k < n; ++k) psi(k) = c[static_cast<std::size_t>(k)];
    return psi;
  }
  double m = 0.0;
  if (text == "auto") {
    m = spin.is_integer() ? 0.0 : 0.5;
  } else if (text.size() > 2 && text.substr(0, 2) == "M=") {
    m = parse_number(text.substr(2));
  } else {
    throw ConfigError("initial state must be 'M=<m>', 'x' or 'auto', got '" + std::string(text) + "'");
  }
  const double k = spin.value() - m;
  const long idx = std::lround(k);
  if (std::abs(k - static_cast<double>(idx)) > 1e-9 || idx < 0 || idx >= n) {
    throw ConfigError("initial state M=" + std::string(text.substr(2)) + " is not a level of spin " +
                      spin.to_string());
  }
  psi(idx) = 1.0;
  return psi;
}

}  // namespace spinrwa
