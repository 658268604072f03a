#include "spinrwa/spin_algebra.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "spinrwa/errors.hpp"

namespace spinrwa {

Spin Spin::from_twice(int twice) {
  if (twice < 1) {
    throw PreconditionError("spin: 2I must be a positive integer, got " + std::to_string(twice));
  }
  return Spin(twice);
}

Spin Spin::from_value(double value) {
  const double twice = 2.0 * value;
  const double rounded = std::round(twice);
  if (!std::isfinite(value) || std::abs(twice - rounded) > 1e-9) {
    throw PreconditionError("spin: " + std::to_string(value) + " is not a half-integer");
  }
  return from_twice(static_cast<int>(rounded));
}

Spin Spin::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    int num = 0;
    int den = 0;
    const auto a = text.substr(0, slash);
    const auto b = text.substr(slash + 1);
    auto r1 = std::from_chars(a.data(), a.data() + a.size(), num);
    auto r2 = std::from_chars(b.data(), b.data() + b.size(), den);
    if (r1.ec != std::errc{} || r1.ptr != a.data() + a.size() || r2.ec != std::errc{} ||
        r2.ptr != b.data() + b.size() || (den != 1 && den != 2)) {
      throw PreconditionError("spin: cannot parse '" + std::string(text) + "'");
    }
    return from_twice(den == 2 ? num : 2 * num);
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(text), &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return from_value(v);
  } catch (const PreconditionError&) {
    throw;
  } catch (const std::exception&) {
    throw PreconditionError("spin: cannot parse '" + std::string(text) + "'");
  }
}

std::string Spin::to_string() const {
  return is_integer() ? std::to_string(twice_ / 2) : std::to_string(twice_) + "/2";
}

void SpinParams::validate() const {
  if (!(Q > 0.0)) throw PreconditionError("SpinParams: Q must be > 0");
  if (!(B1 >= 0.0)) throw PreconditionError("SpinParams: B1 must be >= 0");
  if (!(omega > 0.0)) throw PreconditionError("SpinParams: omega must be > 0");
  if (!(B0 >= 0.0)) throw PreconditionError("SpinParams: B0 must be >= 0");
}

std::vector<std::string> SpinParams::warnings() const {
  std::vector<std::string> out;
  if (B0 >= Q) out.push_back("B0 >= Q: outside the quadrupole-dominant regime");
  return out;
}

std::vector<double> m_values(Spin spin) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(spin.dim()));
  for (int k = 0; k < spin.dim(); ++k) out.push_back(spin.value() - k);
  return out;
}

SpinOperators spin_matrices(Spin spin) {
  const Eigen::Index n = spin.dim();
  const double j = spin.value();
  const auto m = m_values(spin);
  ComplexMatrix plus = ComplexMatrix::Zero(n, n);
  // <M+1| I+ |M> sits at (row of M+1, column of M) = (k-1, k).
  for (Eigen::Index k = 1; k < n; ++k) {
    const double mk = m[static_cast<std::size_t>(k)];
    plus(k - 1, k) = std::sqrt(j * (j + 1.0) - mk * (mk + 1.0));
  }
  const ComplexMatrix minus = plus.adjoint();
  SpinOperators ops;
  ops.spin = spin;
  ops.x = 0.5 * (plus + minus);
  ops.y = (plus - minus) / Complex(0.0, 2.0);
  ops.z = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) ops.z(k, k) = m[static_cast<std::size_t>(k)];
  return ops;
}

ComplexMatrix ia_operator(Spin spin) {
  if (!spin.is_integer()) {
    throw PreconditionError("ia_operator: defined for integer spin only, got " + spin.to_string());
  }
  const auto m = m_values(spin);
  const Eigen::Index n = spin.dim();
  ComplexMatrix ia = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double mk = m[static_cast<std::size_t>(k)];
    ia(k, k) = mk > 0.5 ? 1.0 : (mk < -0.5 ? -1.0 : 0.0);
  }
  return ia;
}

ComplexMatrix rotation_y(Spin spin, double angle) {
  return expm_unitary(spin_matrices(spin).y, angle);
}

std::vector<double> rotated_coeffs(Spin spin) {
  const ComplexMatrix r = rotation_y(spin, std::numbers::pi / 2.0);
  std::vector<double> c;
  c.reserve(static_cast<std::size_t>(spin.dim()));
  for (Eigen::Index k = 0; k < spin.dim(); ++k) {
    const Complex v = r(k, 0);
    if (std::abs(v.imag()) > 1e-12) {
      throw NumericalError("rotated_coeffs: coefficient is not real", std::abs(v.imag()));
    }
    c.push_back(v.real());
  }
  return c;
}

Eigen::Index product_index(int i_int, bool spin_up, double m_i) {
  const Eigen::Index block = 2 * i_int + 1;
  const auto within = static_cast<Eigen::Index>(std::lround(i_int - m_i));
  return (spin_up ? 0 : block) + within;
}

CompositionMap clebsch_embed(int i_int) {
  if (i_int < 0) throw PreconditionError("clebsch_embed: I_int must be >= 0");
  CompositionMap map;
  map.i_int = i_int;
  map.j = Spin::from_twice(2 * i_int + 1);
  const double j = map.j.value();
  const Eigen::Index rows = 2 * (2 * i_int + 1);
  map.embedding = ComplexMatrix::Zero(rows, map.j.dim());
  const auto mj = m_values(map.j);
  for (Eigen::Index col = 0; col < map.j.dim(); ++col) {
    const double m = mj[static_cast<std::size_t>(col)];
    const double up_mi = m - 0.5;
    const double down_mi = m + 0.5;
    if (std::abs(up_mi) <= i_int + 1e-9) {
      map.embedding(product_index(i_int, true, up_mi), col) = std::sqrt((j + m) / (2.0 * j));
    }
    if (std::abs(down_mi) <= i_int + 1e-9) {
      map.embedding(product_index(i_int, false, down_mi), col) = std::sqrt((j - m) / (2.0 * j));
    }
  }
  return map;
}

}  // namespace spinrwa
