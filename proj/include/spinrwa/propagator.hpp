#pragma once

#include <map>
#include <string>
#include <vector>

#include "spinrwa/linalg.hpp"

namespace spinrwa {

enum class Basis {
  SpinDescending,  // |I,M>, M = I ... -I
  ProductSpace,    // |1/2,M_S> (x) |I_int,M_I>, M_S = +1/2 block first
};

/// A propagator tagged with its time, method and basis.
struct Propagator {
  ComplexMatrix matrix;
  double time = 0.0;
  std::string method;
  Basis basis = Basis::SpinDescending;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> warnings;
};

}  // namespace spinrwa
