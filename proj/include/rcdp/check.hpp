#pragma once

#include <string>
#include <vector>

#include "rcdp/trace.hpp"

namespace rcdp {

struct CheckReport {
  int runs_checked = 0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

// Re-asserts the per-round invariants of a single persisted run. D_t and the
// arrival counts are recomputed from the delay column.
void check_trace(const RunTrace& trace, CheckReport& report);

// Reads manifest.json plus every trace it lists and checks each of them,
// then compares summary.csv with a recomputed summary.
CheckReport check_directory(const std::string& dir);

}  // namespace rcdp
