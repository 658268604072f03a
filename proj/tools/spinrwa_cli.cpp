#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "spinrwa/errors.hpp"
#include "spinrwa/harness.hpp"
#include "spinrwa/selftest.hpp"

using namespace spinrwa;

namespace {

struct CommonFlags {
  std::string spin;
  double Q = 0, B0 = 0, B1 = 0, omega = 0, dt = 0, M_target = 0;
  std::string methods, initial, config, out;
  bool allow_large_step = false;
  CLI::Option* o_spin = nullptr;
  CLI::Option* o_Q = nullptr;
  CLI::Option* o_B0 = nullptr;
  CLI::Option* o_B1 = nullptr;
  CLI::Option* o_omega = nullptr;
  CLI::Option* o_dt = nullptr;
  CLI::Option* o_M = nullptr;
  CLI::Option* o_methods = nullptr;
  CLI::Option* o_initial = nullptr;

  void add(CLI::App* app) {
    o_spin = app->add_option("--spin", spin, "Spin quantum number, e.g. 3 or 3/2");
    o_Q = app->add_option("--Q", Q, "Quadrupole coupling (sets the unit)");
    o_B0 = app->add_option("--B0", B0, "Static Zeeman field");
    o_B1 = app->add_option("--B1", B1, "Drive amplitude");
    o_omega = app->add_option("--omega", omega, "Drive frequency");
    o_methods = app->add_option("--methods", methods, "exact,rwa-zeeman,rwa-reduced,rwa-full,chrw");
    o_initial = app->add_option("--initial", initial, "Initial state: M=<m>, x or auto");
    o_M = app->add_option("--M-target", M_target, "Pin the reduced block to the |M>,|M-1> transition");
    o_dt = app->add_option("--dt", dt, "RK4 step (default: 1/200 of the fastest period)");
    app->add_flag("--allow-large-step", allow_large_step, "Permit steps beyond 1/100 of the fastest period");
    app->add_option("--config", config, "JSON config file; flags take precedence");
    app->add_option("--out", out, "Output prefix for <out>.csv and <out>.manifest.json")->required();
  }

  void apply(SpinParams& p, std::vector<Method>& m, std::string& init, std::optional<double>& mt,
             ExactSolverConfig& solver) const {
    if (o_spin->count()) p.spin = Spin::parse(spin);
    if (o_Q->count()) p.Q = Q;
    if (o_B0->count()) p.B0 = B0;
    if (o_B1->count()) p.B1 = B1;
    if (o_omega->count()) p.omega = omega;
    if (o_methods->count()) m = parse_method_list(methods);
    if (o_initial->count()) init = initial;
    if (o_M->count()) mt = M_target;
    if (o_dt->count()) solver.dt = dt;
    if (allow_large_step) solver.allow_large_step = true;
  }
};

int finish(const RunResult& r, const std::string& out) {
  write_outputs(out, r);
  for (const auto& w : r.manifest.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return r.any_failure ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven quadrupolar spin: RWA variants against RK4 reference"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  CommonFlags ts_flags;
  double t_max_pi = 0;
  int ts_samples = 0;
  auto* ts = app.add_subcommand("timeseries", "Fidelity time series of several methods");
  ts_flags.add(ts);
  auto* o_tmax = ts->add_option("--t-max-pi", t_max_pi, "Duration in units of T_pi (default 20)");
  auto* o_ts_samples = ts->add_option("--samples", ts_samples, "Number of samples (default 1000)");

  CommonFlags sw_flags;
  std::string vary, metric;
  double from = 0, to = 0, window = 0;
  int points = 0, sw_samples = 0, parallel = 1;
  auto* sw = app.add_subcommand("sweep", "Window-averaged fidelity over an omega or B1 grid");
  sw_flags.add(sw);
  auto* o_vary = sw->add_option("--vary", vary, "omega or B1")->check(CLI::IsMember({"omega", "B1"}));
  auto* o_from = sw->add_option("--from", from, "Grid start");
  auto* o_to = sw->add_option("--to", to, "Grid end");
  auto* o_points = sw->add_option("--points", points, "Grid points (>= 2)");
  auto* o_window = sw->add_option("--window", window, "Averaging window in units of T_pi (default 20)");
  auto* o_sw_samples = sw->add_option("--samples", sw_samples, "Samples per window (default 1000)");
  auto* o_metric = sw->add_option("--metric", metric, "operator or state")->check(CLI::IsMember({"operator", "state"}));
  sw->add_option("--parallel", parallel, "Worker threads (capped by SPINRWA_THREADS)");

  bool quick = false;
  std::uint64_t seed = 1;
  auto* st = app.add_subcommand("selftest", "Run the invariant checks");
  st->add_flag("--quick", quick, "Subset suite");
  st->add_option("--seed", seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ts) {
      TimeseriesSpec spec;
      if (!ts_flags.config.empty()) apply_config(load_json_file(ts_flags.config), spec);
      ts_flags.apply(spec.params, spec.methods, spec.initial, spec.M_target, spec.solver);
      if (o_tmax->count()) spec.t_max_pi = t_max_pi;
      if (o_ts_samples->count()) spec.samples = ts_samples;
      return finish(run_timeseries(spec), ts_flags.out);
    }
    if (*sw) {
      SweepSpec spec;
      if (!sw_flags.config.empty()) apply_config(load_json_file(sw_flags.config), spec);
      sw_flags.apply(spec.fixed, spec.methods, spec.initial, spec.M_target, spec.solver);
      if (o_vary->count()) spec.vary = vary == "omega" ? SweepVar::Omega : SweepVar::B1;
      if (o_from->count()) spec.from = from;
      if (o_to->count()) spec.to = to;
      if (o_points->count()) spec.points = points;
      if (o_window->count()) spec.average_window = window;
      if (o_sw_samples->count()) spec.samples = sw_samples;
      if (o_metric->count()) spec.metric = metric == "state" ? Metric::State : Metric::Operator;
      return finish(run_sweep(spec, resolve_threads(parallel)), sw_flags.out);
    }
    if (*st) {
      const auto rows = run_selftest(SelftestOptions{quick, seed});
      std::cout << format_selftest(rows);
      for (const auto& r : rows) {
        if (!r.pass) return 1;
      }
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
