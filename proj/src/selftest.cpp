#include "spinrwa/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>

#include "spinrwa/chrw.hpp"
#include "spinrwa/exact_evolution.hpp"
#include "spinrwa/fidelity.hpp"
#include "spinrwa/linalg.hpp"
#include "spinrwa/rwa_full.hpp"
#include "spinrwa/rwa_reduced.hpp"
#include "spinrwa/spin_algebra.hpp"

namespace spinrwa {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  // Explicit mapping keeps the draws identical across standard libraries.
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

ComplexMatrix random_hermitian(Rng& rng, Eigen::Index n) {
  ComplexMatrix a(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) a(r, c) = Complex(uniform(rng, -1, 1), uniform(rng, -1, 1));
  }
  return 0.5 * (a + a.adjoint());
}

const int kTwiceSpins[] = {2, 3, 4, 5, 6};

SpinParams random_params(Rng& rng) {
  SpinParams p;
  p.spin = Spin::from_twice(kTwiceSpins[rng() % 5]);
  p.Q = 1.0;
  p.B0 = uniform(rng, 0.0, 0.2);
  p.B1 = uniform(rng, 0.05, 0.8);
  p.omega = uniform(rng, 0.6, 1.6);
  if (!p.spin.is_integer() && p.B0 < 0.01) p.B0 = 0.01;
  return p;
}

struct Check {
  const char* name;
  double tolerance;
  bool heavy;
  std::function<double(Rng&, bool)> run;  // returns the worst residual
};

ComplexMatrix diag_phases(const SpinParams& p, double t) {
  const auto m = m_values(p.spin);
  ComplexMatrix u = ComplexMatrix::Zero(p.spin.dim(), p.spin.dim());
  for (std::size_t k = 0; k < m.size(); ++k) {
    u(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) =
        std::polar(1.0, -(p.Q * m[k] * m[k] + p.B0 * m[k]) * t);
  }
  return u;
}

std::vector<Check> checks() {
  return {
      {"jacobi_reconstruction", 1e-10, false,
       [](Rng& rng, bool quick) {
         double worst = 0.0;
         for (int k = 0; k < (quick ? 10 : 50); ++k) {
           const ComplexMatrix h = random_hermitian(rng, 2 + static_cast<Eigen::Index>(rng() % 7));
           const auto e = hermitian_eig(h);
           const ComplexMatrix rec = e.eigenvectors * e.eigenvalues.cast<Complex>().asDiagonal() *
                                     e.eigenvectors.adjoint();
           worst = std::max(worst, max_abs(rec - h));
         }
         return worst;
       }},
      {"expm_group_property", 1e-10, false,
       [](Rng& rng, bool quick) {
         double worst = 0.0;
         for (int k = 0; k < (quick ? 5 : 25); ++k) {
           const SpectralExponential ex(random_hermitian(rng, 2 + static_cast<Eigen::Index>(rng() % 7)));
           const double a = uniform(rng, -3, 3);
           const double b = uniform(rng, -3, 3);
           worst = std::max(worst, max_abs(ex.at(a + b) - ex.at(a) * ex.at(b)));
         }
         return worst;
       }},
      {"spin_commutators", 1e-12, false,
       [](Rng&, bool) {
         double worst = 0.0;
         for (int twice = 1; twice <= 8; ++twice) {
           const auto s = spin_matrices(Spin::from_twice(twice));
           const Complex i(0.0, 1.0);
           worst = std::max(worst, max_abs(commutator(s.x, s.y) - i * s.z));
           worst = std::max(worst, max_abs(commutator(s.y, s.z) - i * s.x));
           worst = std::max(worst, max_abs(commutator(s.z, s.x) - i * s.y));
         }
         return worst;
       }},
      {"clebsch_isometry", 1e-12, false,
       [](Rng&, bool) {
         double worst = 0.0;
         for (int i_int = 0; i_int <= 3; ++i_int) {
           const auto map = clebsch_embed(i_int);
           const auto n = map.embedding.cols();
           worst = std::max(worst, max_abs(map.embedding.adjoint() * map.embedding - ComplexMatrix::Identity(n, n)));
         }
         return worst;
       }},
      {"spin_vector_closed_form", 1e-9, false,
       [](Rng&, bool quick) {
         double worst = 0.0;
         for (int twice : {1, 2, 3, 4, 6}) {
           const Spin spin = Spin::from_twice(twice);
           const auto s = spin_matrices(spin);
           const auto c = rotated_coeffs(spin);
           ComplexVector psi(spin.dim());
           for (Eigen::Index k = 0; k < spin.dim(); ++k) psi(k) = c[static_cast<std::size_t>(k)];
           const SpectralExponential ex(s.z * s.z);
           for (int k = 0; k < (quick ? 10 : 100); ++k) {
             const double t = 0.1 * k;
             const ComplexVector v = ex.at(t) * psi;
             const auto closed = spin_vector_closed(spin, 1.0, t);
             worst = std::max(worst, std::abs(v.dot(s.x * v).real() - closed.vx));
             worst = std::max(worst, std::abs(v.dot(s.y * v).real() - closed.vy));
             worst = std::max(worst, std::abs(v.dot(s.z * v).real() - closed.vz));
           }
         }
         return worst;
       }},
      {"rk4_static_exactness", 1e-9, false,
       [](Rng& rng, bool) {
         SpinParams p = random_params(rng);
         p.B1 = 0.0;
         return max_abs(rk4_propagator(p, 5.0).matrix - diag_phases(p, 5.0));
       }},
      {"su3_vs_spectral", 1e-8, false,
       [](Rng& rng, bool quick) {
         double worst = 0.0;
         for (int k = 0; k < (quick ? 10 : 60); ++k) {
           SpinParams p;
           p.B0 = uniform(rng, 0.0, 0.2);
           p.B1 = uniform(rng, 0.05, 1.0);
           p.omega = uniform(rng, 0.5, 1.5);
           const ComplexMatrix h = three_level_rwa_heff(p);
           const auto form = make_su3_form(h, three_level_rwa_u(p));
           const double t = uniform(rng, 0.0, 30.0);
           worst = std::max(worst, max_abs(form.exponential(t) - SpectralExponential(h).at(t)));
         }
         return worst;
       }},
      {"closed_form_unitarity", 1e-9, false,
       [](Rng& rng, bool quick) {
         double worst = 0.0;
         for (int k = 0; k < (quick ? 5 : 30); ++k) {
           const SpinParams p = random_params(rng);
           const double t = uniform(rng, 0.0, 20.0) * t_pi(p).value;
           worst = std::max(worst, unitarity_residual(ZeemanRwa(p).at(t).matrix));
           worst = std::max(worst, unitarity_residual(ReducedRwa(p).at(t).matrix));
           worst = std::max(worst, unitarity_residual(ChrwAssembled(p).at(t).matrix));
           const auto full = p.spin.is_integer() ? FullRwaInteger(p).at(t) : FullRwaHalfInteger(p).at(t);
           worst = std::max(worst, unitarity_residual(full.matrix));
         }
         return worst;
       }},
      {"spin1_full_equals_reduced", 1e-9, false,
       [](Rng& rng, bool quick) {
         double worst = 0.0;
         for (int k = 0; k < (quick ? 5 : 30); ++k) {
           SpinParams p = random_params(rng);
           p.spin = Spin::from_twice(2);
           const double t = uniform(rng, 0.0, 40.0);
           worst = std::max(worst, max_abs(FullRwaInteger(p).at(t).matrix - ReducedRwa(p).at(t).matrix));
         }
         return worst;
       }},
      {"xi_small_drive_limit", 1e-5, false,
       [](Rng&, bool) { return std::abs(solve_xi(1.0, 1e-6, 1.0).xi - 0.5); }},
      {"xi_self_consistency", 1e-12, false,
       [](Rng& rng, bool quick) {
         double worst = 0.0;
         for (int k = 0; k < (quick ? 5 : 40); ++k) {
           const double kappa = uniform(rng, 0.5, 2.0);
           const double b = uniform(rng, 0.0, 1.0);
           const auto cp = solve_xi(kappa, b, uniform(rng, 0.5, 2.0));
           worst = std::max(worst, std::abs(cp.residual) / std::max(kappa, b));
         }
         return worst;
       }},
      {"bessel_j0_first_zero", 5e-7, false, [](Rng&, bool) { return std::abs(bessel_j(0, 2.404826)); }},
      {"operator_fidelity_symmetry", 1e-12, false,
       [](Rng& rng, bool) {
         const ComplexMatrix a = expm_unitary(random_hermitian(rng, 5), 1.0);
         const ComplexMatrix b = expm_unitary(random_hermitian(rng, 5), 1.0);
         const ComplexMatrix w = expm_unitary(random_hermitian(rng, 5), 1.0);
         return std::max(std::abs(operator_fidelity(a, b) - operator_fidelity(b, a)),
                         std::abs(operator_fidelity(w * a, w * b) - operator_fidelity(a, b)));
       }},
      {"rk4_unitarity", 1e-7, true,
       [](Rng& rng, bool) {
         double worst = 0.0;
         for (int k = 0; k < 5; ++k) {
           const SpinParams p = random_params(rng);
           worst = std::max(worst, unitarity_residual(rk4_propagator(p, 20.0 * t_pi(p).value).matrix));
         }
         return worst;
       }},
      {"weak_drive_resonant", 1e-3, true,
       [](Rng&, bool) {
         SpinParams p;
         p.spin = Spin::from_twice(6);
         p.B0 = 0.05;
         p.B1 = 0.01;
         p.omega = p.Q + p.B0;
         const ComplexVector psi(parse_initial_state("M=0", p.spin));
         const auto traces =
             trace_methods(p, {Method::RwaReduced, Method::RwaFull, Method::Chrw}, 1.0, 50, psi);
         double worst = 0.0;
         for (const auto& tr : traces) {
           for (double f : tr.f_state) worst = std::max(worst, 1.0 - f);
         }
         return worst;
       }},
  };
}

}  // namespace

std::vector<SelftestRow> run_selftest(const SelftestOptions& opts) {
  std::vector<SelftestRow> rows;
  std::uint64_t k = 0;
  for (const auto& c : checks()) {
    ++k;
    if (opts.quick && c.heavy) continue;
    Rng rng(opts.seed * 0x9E3779B97F4A7C15ull + k);
    SelftestRow row;
    row.name = c.name;
    row.tolerance = c.tolerance;
    try {
      row.value = c.run(rng, opts.quick);
      row.pass = std::isfinite(row.value) && row.value <= c.tolerance;
    } catch (const std::exception& e) {
      row.pass = false;
      row.value = std::numeric_limits<double>::quiet_NaN();
      row.detail = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_selftest(const std::vector<SelftestRow>& rows) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-30s %-6s %-12s %-12s\n", "check", "result", "residual", "tolerance");
  out += buf;
  int failed = 0;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-30s %-6s %-12.3e %-12.3e", r.name.c_str(), r.pass ? "PASS" : "FAIL", r.value,
                  r.tolerance);
    out += buf;
    if (!r.detail.empty()) out += "  " + r.detail;
    out += '\n';
    if (!r.pass) ++failed;
  }
  std::snprintf(buf, sizeof buf, "%zu checks, %d failed\n", rows.size(), failed);
  out += buf;
  return out;
}

}  // namespace spinrwa
