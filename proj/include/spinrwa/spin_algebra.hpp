#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "spinrwa/linalg.hpp"

namespace spinrwa {

/// Spin quantum number stored as 2I so half-integers are exact.
class Spin {
public:
  constexpr Spin() = default;
  static Spin from_twice(int twice);
  /// Accepts 1.5 or any double within 1e-9 of a half-integer.
  static Spin from_value(double value);
  /// Parses "3", "3/2", "1.5".
  static Spin parse(std::string_view text);

  constexpr int twice() const noexcept { return twice_; }
  constexpr double value() const noexcept { return 0.5 * twice_; }
  constexpr Eigen::Index dim() const noexcept { return twice_ + 1; }
  constexpr bool is_integer() const noexcept { return twice_ % 2 == 0; }
  std::string to_string() const;

  friend constexpr bool operator==(Spin, Spin) = default;

private:
  constexpr explicit Spin(int twice) : twice_(twice) {}
  int twice_ = 1;
};

/// Physical parameters in units where Q = 1 by default (hbar = gamma = 1).
struct SpinParams {
  Spin spin = Spin::from_twice(2);
  double Q = 1.0;
  double B0 = 0.0;
  double B1 = 0.0;
  double omega = 1.0;

  /// Throws PreconditionError when an invariant fails.
  void validate() const;
  /// Non-fatal remarks (e.g. B0 >= Q leaves the quadrupole-dominant regime).
  std::vector<std::string> warnings() const;
};

struct SpinOperators {
  Spin spin;
  ComplexMatrix x;
  ComplexMatrix y;
  ComplexMatrix z;
};

/// Magnetic quantum numbers I, I-1, ..., -I (the global basis order).
std::vector<double> m_values(Spin spin);

/// Ladder construction in the |I,M> basis, M descending.
SpinOperators spin_matrices(Spin spin);

/// Diagonal sign-of-M operator: +1 for M >= 1, 0 for M = 0, -1 for M <= -1.
/// Only defined for integer spin.
ComplexMatrix ia_operator(Spin spin);

/// e^{-i angle I_y}
ComplexMatrix rotation_y(Spin spin, double angle);

/// Coefficients c_M of e^{-i(pi/2) I_y}|I,I> in the descending-M basis.
/// e^{-i theta I_y} is real in this representation; imaginary parts above
/// 1e-12 raise NumericalError.
std::vector<double> rotated_coeffs(Spin spin);

/// Embedding of the top multiplet J = I_int + 1/2 of (1/2) x (I_int).
struct CompositionMap {
  int i_int = 0;
  Spin j;
  /// (2 (2 I_int + 1)) x (2J + 1); rows in product order (M_S = +1/2 block
  /// first, M_I descending inside each block), columns M_J descending.
  ComplexMatrix embedding;
};

CompositionMap clebsch_embed(int i_int);

/// Row index of |M_S> (x) |I_int, M_I> in the product basis.
Eigen::Index product_index(int i_int, bool spin_up, double m_i);

}  // namespace spinrwa
