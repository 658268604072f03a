#include "spinrwa/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "spinrwa/errors.hpp"
#include "spinrwa/linalg.hpp"

namespace spinrwa {

using nlohmann::json;

namespace {

std::string methods_csv(const std::vector<Method>& methods) {
  std::string s;
  for (std::size_t k = 0; k < methods.size(); ++k) {
    if (k) s += ',';
    s += method_name(methods[k]);
  }
  return s;
}

json params_json(const SpinParams& p) {
  return json{{"spin", p.spin.to_string()}, {"Q", p.Q}, {"B0", p.B0}, {"B1", p.B1}, {"omega", p.omega}};
}

json tolerances_json(const SpinParams& p, const ExactSolverConfig& cfg) {
  const LinalgTolerances lt;
  json j{{"hermitian", lt.hermitian},
         {"jacobi_offdiag", lt.jacobi_offdiag},
         {"jacobi_max_sweeps", lt.jacobi_max_sweeps},
         {"reconstruction", lt.reconstruction},
         {"rk4_renormalize", cfg.renormalize},
         {"rk4_renorm_interval", cfg.renorm_interval}};
  try {
    j["rk4_dt"] = resolve_dt(p, cfg);
  } catch (const std::exception&) {
    j["rk4_dt"] = cfg.dt;
  }
  return j;
}

void check_methods(const std::vector<Method>& methods) {
  if (methods.empty()) throw ConfigError("at least one method is required");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sweep_var_name(SweepVar v) { return v == SweepVar::Omega ? "omega" : "B1"; }

Spin spin_from_json(const json& v) {
  if (v.is_string()) return Spin::parse(v.get<std::string>());
  if (v.is_number()) return Spin::from_value(v.get<double>());
  throw ConfigError("config: 'spin' must be a string or a number");
}

std::vector<Method> methods_from_json(const json& v) {
  if (v.is_string()) return parse_method_list(v.get<std::string>());
  if (v.is_array()) {
    std::vector<Method> out;
    for (const auto& item : v) out.push_back(parse_method(item.get<std::string>()));
    return out;
  }
  throw ConfigError("config: 'methods' must be a string or an array");
}

// Shared keys; returns false for keys it does not own.
bool apply_common(const std::string& key, const json& v, SpinParams& p, std::vector<Method>& methods,
                  std::string& initial, std::optional<double>& m_target, ExactSolverConfig& solver) {
  if (key == "spin") p.spin = spin_from_json(v);
  else if (key == "Q") p.Q = v.get<double>();
  else if (key == "B0") p.B0 = v.get<double>();
  else if (key == "B1") p.B1 = v.get<double>();
  else if (key == "omega") p.omega = v.get<double>();
  else if (key == "methods") methods = methods_from_json(v);
  else if (key == "initial") initial = v.get<std::string>();
  else if (key == "M_target") m_target = v.get<double>();
  else if (key == "dt") solver.dt = v.get<double>();
  else if (key == "allow_large_step") solver.allow_large_step = v.get<bool>();
  else return false;
  return true;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void TimeseriesSpec::validate() const {
  params.validate();
  check_methods(methods);
  if (!(t_max_pi > 0.0)) throw ConfigError("t-max-pi must be positive");
  if (samples < 2) throw ConfigError("samples must be >= 2");
  resolve_dt(params, solver);
  parse_initial_state(initial, params.spin);
}

void SweepSpec::validate() const {
  check_methods(methods);
  if (!(from < to)) throw ConfigError("sweep requires from < to");
  if (points < 2) throw ConfigError("sweep requires points >= 2");
  if (!(average_window > 0.0)) throw ConfigError("average window must be positive");
  if (samples < 2) throw ConfigError("samples must be >= 2");
  params_at(from).validate();
  params_at(to).validate();
  parse_initial_state(initial, fixed.spin);
}

std::vector<double> SweepSpec::grid() const {
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    g[static_cast<std::size_t>(k)] = from + (to - from) * static_cast<double>(k) / (points - 1);
  }
  g.back() = to;
  return g;
}

SpinParams SweepSpec::params_at(double value) const {
  SpinParams p = fixed;
  if (vary == SweepVar::Omega) p.omega = value;
  else p.B1 = value;
  return p;
}

json RunManifest::to_json() const {
  return json{{"command", command},   {"tool_version", tool_version}, {"parameters", parameters},
              {"tolerances", tolerances}, {"grid", grid},             {"warnings", warnings},
              {"wall_clock_s", wall_clock_s}};
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.tool_version = j.at("tool_version").get<std::string>();
  m.parameters = j.at("parameters");
  m.tolerances = j.at("tolerances");
  m.grid = j.at("grid");
  m.warnings = j.at("warnings").get<std::vector<std::string>>();
  m.wall_clock_s = j.at("wall_clock_s").get<double>();
  return m;
}

RunResult run_timeseries(const TimeseriesSpec& spec) {
  const auto t0 = std::chrono::steady_clock::now();
  spec.validate();
  const ComplexVector psi0 = parse_initial_state(spec.initial, spec.params.spin);
  TraceOptions opts;
  opts.evaluator.M_target = spec.M_target;
  opts.evaluator.solver = spec.solver;
  const auto traces = trace_methods(spec.params, spec.methods, spec.t_max_pi, spec.samples, psi0, opts);

  RunResult res;
  std::string& csv = res.csv;
  csv = "t_over_Tpi,t_absolute,method,f_state,F_op\n";
  for (std::size_t k = 0; k < static_cast<std::size_t>(spec.samples); ++k) {
    for (const auto& tr : traces) {
      csv += format_number(tr.times_over_tpi[k]);
      csv += ',';
      csv += format_number(tr.times[k]);
      csv += ',';
      csv += tr.method;
      csv += ',';
      csv += format_number(tr.f_state[k]);
      csv += ',';
      csv += format_number(tr.F_op[k]);
      csv += '\n';
    }
  }

  RunManifest& m = res.manifest;
  m.command = "timeseries";
  m.parameters = params_json(spec.params);
  m.parameters["methods"] = methods_csv(spec.methods);
  m.parameters["initial"] = spec.initial;
  if (spec.M_target) m.parameters["M_target"] = *spec.M_target;
  m.tolerances = tolerances_json(spec.params, spec.solver);
  m.grid = json{{"t_max_pi", spec.t_max_pi}, {"samples", spec.samples}, {"T_pi", t_pi(spec.params).value}};
  for (const auto& w : spec.params.warnings()) m.warnings.push_back(w);
  for (const auto& tr : traces) {
    for (const auto& w : tr.warnings) m.warnings.push_back(tr.method + ": " + w);
    if (!tr.error.empty()) {
      m.warnings.push_back(tr.method + " failed: " + tr.error);
      res.any_failure = true;
    }
  }
  m.wall_clock_s = seconds_since(t0);
  return res;
}

RunResult run_sweep(const SweepSpec& spec, int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  spec.validate();
  const std::vector<double> grid = spec.grid();
  const ComplexVector psi0 = parse_initial_state(spec.initial, spec.fixed.spin);
  TraceOptions opts;
  opts.evaluator.M_target = spec.M_target;
  opts.evaluator.solver = spec.solver;

  struct PointResult {
    std::vector<double> means;
    std::vector<std::string> notes;
    bool failed = false;
  };
  std::vector<PointResult> results(grid.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();

  auto work = [&](std::size_t k) {
    PointResult& r = results[k];
    r.means.assign(spec.methods.size(), nan);
    const std::string where = sweep_var_name(spec.vary) + "=" + format_number(grid[k]);
    try {
      const auto traces =
          trace_methods(spec.params_at(grid[k]), spec.methods, spec.average_window, spec.samples, psi0, opts);
      for (std::size_t j = 0; j < traces.size(); ++j) {
        if (!traces[j].error.empty()) {
          r.notes.push_back(where + " " + traces[j].method + " failed: " + traces[j].error);
          r.failed = true;
          continue;
        }
        r.means[j] = window_average(traces[j], spec.metric, spec.average_window);
      }
    } catch (const std::exception& e) {
      r.notes.push_back(where + " failed: " + e.what());
      r.failed = true;
    }
  };

  const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(grid.size())));
  if (n_threads == 1) {
    for (std::size_t k = 0; k < grid.size(); ++k) work(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < n_threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < grid.size(); k = next++) work(k);
      });
    }
    for (auto& th : pool) th.join();
  }

  RunResult res;
  res.csv = spec.metric == Metric::Operator ? "sweep_value,method,mean_F_op\n" : "sweep_value,method,mean_f_state\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (std::size_t j = 0; j < spec.methods.size(); ++j) {
      res.csv += format_number(grid[k]);
      res.csv += ',';
      res.csv += method_name(spec.methods[j]);
      res.csv += ',';
      res.csv += format_number(results[k].means[j]);
      res.csv += '\n';
    }
  }

  RunManifest& m = res.manifest;
  m.command = "sweep";
  m.parameters = params_json(spec.fixed);
  m.parameters["vary"] = sweep_var_name(spec.vary);
  m.parameters["methods"] = methods_csv(spec.methods);
  m.parameters["metric"] = spec.metric == Metric::Operator ? "operator" : "state";
  m.parameters["initial"] = spec.initial;
  if (spec.M_target) m.parameters["M_target"] = *spec.M_target;
  m.tolerances = tolerances_json(spec.fixed, spec.solver);
  m.grid = json{{"from", spec.from},
                {"to", spec.to},
                {"points", spec.points},
                {"average_window", spec.average_window},
                {"samples", spec.samples},
                {"threads", n_threads}};
  for (const auto& r : results) {
    for (const auto& note : r.notes) m.warnings.push_back(note);
    res.any_failure = res.any_failure || r.failed;
  }
  m.wall_clock_s = seconds_since(t0);
  return res;
}

int resolve_threads(int requested) {
  int n = std::max(1, requested);
  if (const char* env = std::getenv("SPINRWA_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<int>(n, static_cast<int>(cap));
  }
  return n;
}

void apply_config(const json& j, TimeseriesSpec& spec) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (apply_common(key, v, spec.params, spec.methods, spec.initial, spec.M_target, spec.solver)) continue;
      if (key == "t_max_pi") spec.t_max_pi = v.get<double>();
      else if (key == "samples") spec.samples = v.get<int>();
      else throw ConfigError("config: unknown key '" + key + "' for timeseries");
    } catch (const json::exception& e) {
      throw ConfigError("config: bad value for '" + key + "': " + e.what());
    }
  }
}

void apply_config(const json& j, SweepSpec& spec) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (apply_common(key, v, spec.fixed, spec.methods, spec.initial, spec.M_target, spec.solver)) continue;
      if (key == "vary") {
        const auto s = v.get<std::string>();
        if (s == "omega") spec.vary = SweepVar::Omega;
        else if (s == "B1") spec.vary = SweepVar::B1;
        else throw ConfigError("config: vary must be 'omega' or 'B1'");
      } else if (key == "from") spec.from = v.get<double>();
      else if (key == "to") spec.to = v.get<double>();
      else if (key == "points") spec.points = v.get<int>();
      else if (key == "average_window") spec.average_window = v.get<double>();
      else if (key == "samples") spec.samples = v.get<int>();
      else if (key == "metric") {
        const auto s = v.get<std::string>();
        if (s == "operator") spec.metric = Metric::Operator;
        else if (s == "state") spec.metric = Metric::State;
        else throw ConfigError("config: metric must be 'operator' or 'state'");
      } else throw ConfigError("config: unknown key '" + key + "' for sweep");
    } catch (const json::exception& e) {
      throw ConfigError("config: bad value for '" + key + "': " + e.what());
    }
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
}

void write_outputs(const std::string& out_prefix, const RunResult& result) {
  const std::string csv_path = out_prefix + ".csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw ConfigError("cannot write '" + csv_path + "'");
  csv << result.csv;
  const std::string man_path = out_prefix + ".manifest.json";
  std::ofstream man(man_path, std::ios::binary);
  if (!man) throw ConfigError("cannot write '" + man_path + "'");
  man << result.manifest.to_json().dump(2) << '\n';
}

}  // namespace spinrwa
