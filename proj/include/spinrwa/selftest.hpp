#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spinrwa {

struct SelftestOptions {
  bool quick = false;
  std::uint64_t seed = 1;
};

struct SelftestRow {
  std::string name;
  bool pass = false;
  double value = 0.0;  // worst residual observed
  double tolerance = 0.0;
  std::string detail;
};

/// Desk-scale invariant checks across all modules. Deterministic for a seed.
std::vector<SelftestRow> run_selftest(const SelftestOptions& opts);
/// Fixed-width table, one row per check, followed by a summary line.
std::string format_selftest(const std::vector<SelftestRow>& rows);

}  // namespace spinrwa
