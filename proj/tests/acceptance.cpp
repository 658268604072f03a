// Acceptance suite: one PASS/FAIL line per criterion with the measured values.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "spinrwa/chrw.hpp"
#include "spinrwa/exact_evolution.hpp"
#include "spinrwa/fidelity.hpp"
#include "spinrwa/harness.hpp"
#include "spinrwa/rwa_full.hpp"
#include "spinrwa/rwa_reduced.hpp"

using namespace spinrwa;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

SpinParams make(int twice, double B0, double B1, double omega) {
  SpinParams p;
  p.spin = Spin::from_twice(twice);
  p.B0 = B0;
  p.B1 = B1;
  p.omega = omega;
  return p;
}

int worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return resolve_threads(hw == 0 ? 1 : static_cast<int>(hw));
}

// Parses "value,method,mean" rows into per-method columns in method order.
std::vector<std::vector<double>> sweep_columns(const RunResult& r, std::size_t n_methods) {
  std::vector<std::vector<double>> cols(n_methods);
  std::size_t row = 0;
  std::size_t pos = r.csv.find('\n') + 1;
  while (pos < r.csv.size()) {
    const std::size_t end = r.csv.find('\n', pos);
    const std::string line = r.csv.substr(pos, end - pos);
    cols[row % n_methods].push_back(std::stod(line.substr(line.rfind(',') + 1)));
    ++row;
    pos = end + 1;
  }
  return cols;
}

// --- 1 ------------------------------------------------------------------
Outcome unitarity_suite() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> ub0(0.01, 0.2), ub1(0.05, 0.5), uw(0.8, 1.6), ut(0.0, 20.0);
  const int twice[] = {2, 3, 4, 5, 6};
  double worst_exact = 0.0, worst_closed = 0.0;
  for (int k = 0; k < 50; ++k) {
    const SpinParams p = make(twice[k % 5], ub0(rng), ub1(rng), uw(rng));
    const double t = ut(rng) * t_pi(p).value;
    worst_exact = std::max(worst_exact, unitarity_residual(rk4_propagator(p, t).matrix));
    for (Method m : {Method::RwaZeeman, Method::RwaReduced, Method::RwaFull, Method::Chrw}) {
      worst_closed = std::max(worst_closed, unitarity_residual(make_evaluator(m, p)->at(t).matrix));
    }
  }
  return {worst_exact <= 1e-7 && worst_closed <= 1e-9,
          "50 draws, B1 in [0.05, 0.5], w in [0.8, 1.6]: exact " + fmt("%.2e", worst_exact) + " (<= 1e-7), closed forms " + fmt("%.2e", worst_closed) +
              " (<= 1e-9)"};
}

// --- 2 ------------------------------------------------------------------
Outcome oracle_equivalence() {
  double worst_su3 = 0.0, worst_trace_u = 0.0;
  int fallbacks = 0, explicit_ok = 0, bad = 0;
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      for (int c = 0; c < 5; ++c) {
        const SpinParams p = make(6, 0.05 * a, 0.1 + 0.1 * b, 0.8 + 0.1 * c);
        const ComplexMatrix h = three_level_rwa_heff(p);
        const double t = 7.0;
        worst_su3 = std::max(worst_su3, max_abs(make_su3_form(h, three_level_rwa_u(p)).exponential(t) -
                                                SpectralExponential(h).at(t)));
        const auto cc = ChrwThreeLevel(p).cross_check(t);
        worst_trace_u = std::max(worst_trace_u, cc.residual_trace_u);
        if (cc.fallback) ++fallbacks;
        else if (cc.residual_formula_u <= 1e-6) ++explicit_ok;
        else ++bad;
      }
    }
  }
  return {worst_su3 <= 1e-8 && bad == 0,
          "SU(3) vs spectral " + fmt("%.2e", worst_su3) + " (<= 1e-8); CHRW explicit agrees at " +
              std::to_string(explicit_ok) + "/125, fallback at " + std::to_string(fallbacks) +
              "/125, unflagged disagreement " + std::to_string(bad) + "; trace-normalised explicit " +
              fmt("%.2e", worst_trace_u)};
}

// --- 3 ------------------------------------------------------------------
Outcome spin_vector_law() {
  double worst_heis = 0.0, worst_resum = 0.0;
  for (int twice : {1, 2, 3, 4, 6}) {
    const Spin s = Spin::from_twice(twice);
    const auto ops = spin_matrices(s);
    const auto c = rotated_coeffs(s);
    ComplexVector psi(s.dim());
    for (Eigen::Index k = 0; k < s.dim(); ++k) psi(k) = c[static_cast<std::size_t>(k)];
    const SpectralExponential ex(ops.z * ops.z);
    const auto terms = spin_vector_decomposition(s, 1.0);
    for (int k = 0; k < 100; ++k) {
      const double t = 0.0631 * k;
      const ComplexVector v = ex.at(t) * psi;
      const auto closed = spin_vector_closed(s, 1.0, t);
      worst_heis = std::max({worst_heis, std::abs(v.dot(ops.x * v).real() - closed.vx),
                             std::abs(v.dot(ops.y * v).real() - closed.vy),
                             std::abs(v.dot(ops.z * v).real() - closed.vz)});
      const auto r = resum(terms, t);
      worst_resum = std::max({worst_resum, std::abs(r.vx - closed.vx), std::abs(r.vy - closed.vy),
                              std::abs(r.vz - closed.vz)});
    }
  }
  return {worst_heis <= 1e-9 && worst_resum <= 1e-10,
          "closed vs Heisenberg " + fmt("%.2e", worst_heis) + " (<= 1e-9), resummation " +
              fmt("%.2e", worst_resum) + " (<= 1e-10)"};
}

// --- 4 ------------------------------------------------------------------
Outcome spin1_degeneracy() {
  double worst = 0.0;
  for (double b0 : {0.0, 0.05, 0.2}) {
    for (double b1 : {0.05, 0.5, 1.0}) {
      for (double w : {0.5, 1.0, 1.5}) {
        const SpinParams p = make(2, b0, b1, w);
        for (double t : {0.0, 0.7, 5.0, 40.0}) {
          worst = std::max(worst, max_abs(full_rwa_integer(p, t).matrix - ReducedRwa(p).at(t).matrix));
        }
      }
    }
  }
  return {worst <= 1e-9, "max |U_full - U_reduced| = " + fmt("%.2e", worst) + " (<= 1e-9)"};
}

// Pointwise full >= reduced with at most two violations smaller than 1e-3.
std::pair<bool, std::string> dominance(const std::vector<double>& grid, const std::vector<double>& full,
                                       const std::vector<double>& red) {
  int violations = 0;
  double worst = 0.0, first = std::nan(""), last = std::nan("");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double gap = red[k] - full[k];
    if (gap > 0.0) {
      ++violations;
      worst = std::max(worst, gap);
      if (std::isnan(first)) first = grid[k];
      last = grid[k];
    }
  }
  const bool ok = violations <= 2 && worst < 1e-3;
  std::string d = std::to_string(violations) + " points with reduced > full";
  if (violations) d += " (max excess " + fmt("%.4f", worst) + ", at " + fmt("%.3g", first) + ".." + fmt("%.3g", last) + ")";
  return {ok, d};
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// --- 5 ------------------------------------------------------------------
Outcome omega_sweep() {
  SweepSpec s;
  s.vary = SweepVar::Omega;
  s.from = 0.5;
  s.to = 1.5;
  s.points = 101;
  s.fixed = make(6, 0.05, 0.5, 1.0);
  s.methods = {Method::RwaFull, Method::RwaReduced};
  const auto grid = s.grid();
  const auto cols = sweep_columns(run_sweep(s, worker_count()), 2);
  const auto [dom_ok, dom] = dominance(grid, cols[0], cols[1]);
  const std::size_t q_index = 50;
  const std::size_t mf = argmax(cols[0]), mr = argmax(cols[1]);
  const auto dist = [&](std::size_t k) { return k > q_index ? k - q_index : q_index - k; };
  const bool peak_ok = dist(mf) <= 3 && dist(mr) <= 3;
  return {dom_ok && peak_ok, dom + "; argmax rwa-full at w=" + fmt("%.2f", grid[mf]) + " (F=" +
                                 fmt("%.4f", cols[0][mf]) + "), rwa-reduced at w=" + fmt("%.2f", grid[mr]) +
                                 " (F=" + fmt("%.4f", cols[1][mr]) + "); at w=Q full " +
                                 fmt("%.4f", cols[0][q_index]) + ", reduced " + fmt("%.4f", cols[1][q_index])};
}

// --- 6 ------------------------------------------------------------------
Outcome b1_sweep() {
  SweepSpec s;
  s.vary = SweepVar::B1;
  s.from = 0.05;
  s.to = 1.0;
  s.points = 40;
  s.fixed = make(6, 0.05, 0.5, 1.5);
  s.methods = {Method::RwaFull, Method::RwaReduced};
  const auto grid = s.grid();
  const auto cols = sweep_columns(run_sweep(s, worker_count()), 2);
  const bool dec = cols[0].front() > cols[0].back() && cols[1].front() > cols[1].back();
  const auto [dom_ok, dom] = dominance(grid, cols[0], cols[1]);
  return {dec && dom_ok, "rwa-full " + fmt("%.4f", cols[0].front()) + " -> " + fmt("%.4f", cols[0].back()) +
                             ", rwa-reduced " + fmt("%.4f", cols[1].front()) + " -> " +
                             fmt("%.4f", cols[1].back()) + "; " + dom};
}

struct WindowMeans {
  double f_full, f_red, f_chrw, F_full, F_red, F_chrw;
};

WindowMeans window_means(double omega) {
  const SpinParams p = make(6, 0.05, 0.5, omega);
  const auto psi = parse_initial_state("M=0", p.spin);
  const auto tr = trace_methods(p, {Method::RwaFull, Method::RwaReduced, Method::Chrw}, 20.0, 1000, psi);
  return {window_average(tr[0], Metric::State),    window_average(tr[1], Metric::State),
          window_average(tr[2], Metric::State),    window_average(tr[0], Metric::Operator),
          window_average(tr[1], Metric::Operator), window_average(tr[2], Metric::Operator)};
}

std::string describe(const WindowMeans& m) {
  return "f: full " + fmt("%.4f", m.f_full) + ", reduced " + fmt("%.4f", m.f_red) + ", chrw " +
         fmt("%.4f", m.f_chrw) + "; F: full " + fmt("%.4f", m.F_full) + ", chrw " + fmt("%.4f", m.F_chrw) +
         ", reduced " + fmt("%.4f", m.F_red);
}

// --- 7 ------------------------------------------------------------------
Outcome resonant_ordering(const WindowMeans& m) {
  const double margin = 1e-3;
  const bool ok = m.f_chrw - m.f_red > margin && m.F_full - m.F_chrw > margin && m.F_chrw - m.F_red > margin;
  return {ok, describe(m) + "; margins f(chrw-red) " + fmt("%.2e", m.f_chrw - m.f_red) + ", F(full-chrw) " +
                  fmt("%.2e", m.F_full - m.F_chrw) + ", F(chrw-red) " + fmt("%.2e", m.F_chrw - m.F_red) +
                  " (each > 1e-3)"};
}

// --- 8 ------------------------------------------------------------------
Outcome detuned_ordering(const WindowMeans& m2, const WindowMeans& m3) {
  const double margin = 1e-3;
  const bool op = m3.F_full - m3.F_chrw > margin && m3.F_chrw - m3.F_red > margin;
  const bool state = m3.f_chrw > m3.f_red;
  const double gap2 = m2.f_chrw - m2.f_full, gap3 = m3.f_chrw - m3.f_full;
  return {op && state && gap3 < gap2,
          describe(m3) + "; F margins " + fmt("%.2e", m3.F_full - m3.F_chrw) + ", " +
              fmt("%.2e", m3.F_chrw - m3.F_red) + "; f gap chrw-full " + fmt("%.4f", gap3) + " vs " +
              fmt("%.4f", gap2) + " at w=Q"};
}

// --- 9 ------------------------------------------------------------------
Outcome weak_drive() {
  double worst = 1.0;
  for (int twice : {2, 6}) {
    SpinParams p = make(twice, 0.05, 0.01, 1.0);
    p.omega = select_block(p).omega0_plus;
    const std::vector<Method> methods{Method::RwaReduced, Method::RwaFull, Method::Chrw};
    for (const char* init : {"M=1", "M=0", "M=-1"}) {
      const auto tr = trace_methods(p, methods, 1.0, 100, parse_initial_state(init, p.spin));
      for (const auto& t : tr) {
        for (double f : t.f_state) worst = std::min(worst, f);
      }
    }
  }
  return {worst >= 0.999, "min state fidelity " + fmt("%.6f", worst) + " (>= 0.999) over I in {1, 3}"};
}

// --- 10 -----------------------------------------------------------------
Outcome rk4_order() {
  const SpinParams p = make(6, 0.05, 0.5, 1.0);
  ExactSolverConfig cfg;
  cfg.allow_large_step = true;
  cfg.renormalize = false;
  std::vector<double> c;
  std::string d;
  for (double dt : {0.04, 0.02, 0.01, 0.004}) {
    cfg.dt = dt;
    const ComplexMatrix u = rk4_propagator(p, 5.0, cfg).matrix;
    cfg.dt = dt / 8.0;
    const ComplexMatrix ref = rk4_propagator(p, 5.0, cfg).matrix;
    c.push_back(max_abs(u - ref) / std::pow(dt, 4));
  }
  double mean = 0.0;
  for (double v : c) mean += v / c.size();
  double spread = 0.0;
  for (double v : c) spread = std::max(spread, std::abs(v / mean - 1.0));
  return {spread <= 0.25, "error/dt^4 varies by " + fmt("%.2f%%", 100.0 * spread) +
                              " over dt in [0.004, 0.04] (<= 25%)"};
}

// --- 11 -----------------------------------------------------------------
Outcome xi_solver() {
  const double small = std::abs(solve_xi(1.0, 1e-6, 1.0).xi - 0.5);
  const double res = std::abs(solve_xi(1.0, 0.5 * std::sqrt(6.0), 1.0).residual);
  return {small <= 1e-5 && res <= 1e-12,
          "|xi - w/(k+w)| " + fmt("%.2e", small) + " (<= 1e-5), residual " + fmt("%.2e", res) + " (<= 1e-12)"};
}

// --- 12 -----------------------------------------------------------------
Outcome determinism() {
  TimeseriesSpec ts;
  ts.params = make(6, 0.05, 0.5, 1.0);
  ts.samples = 200;
  ts.initial = "M=0";
  const bool ts_same = run_timeseries(ts).csv == run_timeseries(ts).csv;
  SweepSpec sw;
  sw.fixed = make(6, 0.05, 0.5, 1.0);
  sw.points = 9;
  sw.samples = 200;
  sw.methods = {Method::RwaFull, Method::RwaReduced, Method::Chrw};
  const auto serial = run_sweep(sw, 1).csv;
  const bool sw_same = serial == run_sweep(sw, 1).csv;
  const bool par_same = serial == run_sweep(sw, 4).csv;
  return {ts_same && sw_same && par_same, std::string("timeseries rerun ") + (ts_same ? "identical" : "differs") +
                                              ", sweep rerun " + (sw_same ? "identical" : "differs") +
                                              ", 4 threads vs serial " + (par_same ? "identical" : "differs")};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("[%s] %2d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  };

  report(1, "unitarity suite", unitarity_suite);
  report(2, "oracle equivalence", oracle_equivalence);
  report(3, "spin-vector law", spin_vector_law);
  report(4, "spin-1 degeneracy", spin1_degeneracy);
  report(5, "omega sweep ordering and peaks", omega_sweep);
  report(6, "B1 sweep ordering and decrease", b1_sweep);
  WindowMeans m2{}, m3{};
  bool have = true;
  try {
    m2 = window_means(1.0);
    m3 = window_means(1.5);
  } catch (const std::exception&) {
    have = false;
  }
  report(7, "resonant time-series orderings", [&] {
    if (!have) throw std::runtime_error("time-series evaluation failed");
    return resonant_ordering(m2);
  });
  report(8, "off-resonant time-series orderings", [&] {
    if (!have) throw std::runtime_error("time-series evaluation failed");
    return detuned_ordering(m2, m3);
  });
  report(9, "weak-drive resonant limit", weak_drive);
  report(10, "rk4 order", rk4_order);
  report(11, "xi solver", xi_solver);
  report(12, "determinism", determinism);
  std::printf("%d of 12 criteria passed\n", 12 - failed);
  return failed == 0 ? 0 : 1;
}
