#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinrwa/exact_evolution.hpp"
#include "spinrwa/fidelity.hpp"
#include "spinrwa/methods.hpp"
#include "spinrwa/spin_algebra.hpp"

namespace spinrwa {

inline constexpr const char* kToolVersion = "0.1.0";

struct TimeseriesSpec {
  SpinParams params;
  std::vector<Method> methods{Method::RwaFull, Method::RwaReduced, Method::Chrw};
  double t_max_pi = 20.0;
  int samples = 1000;
  std::string initial = "auto";
  std::optional<double> M_target;
  ExactSolverConfig solver;

  void validate() const;
};

enum class SweepVar { Omega, B1 };

struct SweepSpec {
  SweepVar vary = SweepVar::Omega;
  double from = 0.5;
  double to = 1.5;
  int points = 101;
  SpinParams fixed;
  std::vector<Method> methods{Method::RwaFull, Method::RwaReduced};
  double average_window = 20.0;  // multiples of T_pi
  int samples = 1000;            // per averaging window
  Metric metric = Metric::Operator;
  std::string initial = "auto";
  std::optional<double> M_target;
  ExactSolverConfig solver;

  void validate() const;
  /// from + k (to - from) / (points - 1)
  std::vector<double> grid() const;
  SpinParams params_at(double value) const;
};

struct RunManifest {
  std::string command;
  std::string tool_version = kToolVersion;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json tolerances = nlohmann::json::object();
  nlohmann::json grid = nlohmann::json::object();
  std::vector<std::string> warnings;
  double wall_clock_s = 0.0;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

struct RunResult {
  std::string csv;
  RunManifest manifest;
  bool any_failure = false;
};

/// 12 significant digits, '.' radix, "nan" for NaN, no negative zero.
std::string format_number(double v);

RunResult run_timeseries(const TimeseriesSpec& spec);
/// Grid points are distributed over `threads` workers; the CSV is assembled
/// in grid order afterwards so it does not depend on the thread count.
RunResult run_sweep(const SweepSpec& spec, int threads = 1);

/// min(requested, SPINRWA_THREADS) when the variable is a positive integer.
int resolve_threads(int requested);

/// Config-file keys mirror the long flag names with '-' replaced by '_'.
/// Unknown keys raise ConfigError.
void apply_config(const nlohmann::json& j, TimeseriesSpec& spec);
void apply_config(const nlohmann::json& j, SweepSpec& spec);
nlohmann::json load_json_file(const std::string& path);

/// Writes `<out>.csv` and `<out>.manifest.json`.
void write_outputs(const std::string& out_prefix, const RunResult& result);

}  // namespace spinrwa
