#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcdp/policies.hpp"

namespace rcdp {

struct TraceRow {
  int t = 0;
  double regret = 0.0;
  double cum_regret = 0.0;
  double weight = 1.0;
  double dz_norm = 0.0;  // ||dz_t|| in the inverse weighting matrix before the update
  int arrivals = 0;
  int invisible = 0;     // D_t
  int flipped = 0;       // |l_t - gamma_t|
  long delay = 0;        // tau_t
};

// Per-run constants needed to re-assert invariants from a persisted trace.
struct RunMeta {
  std::string policy;
  std::uint64_t seed = 0;
  int dim = 0;
  double alpha = 0.0;  // +inf for unweighted policies
  double kappa = 0.0;
  double lambda = 0.0;
  bool phantom = false;
  long corruption_budget = 0;
  std::string delay_regime;
  long delay_budget = 0;
  long corruptions_spent = 0;
  long delay_spent = 0;
  double wall_seconds = 0.0;
};

struct RunTrace {
  RunMeta meta;
  std::vector<TraceRow> rows;

  double final_regret() const { return rows.empty() ? 0.0 : rows.back().cum_regret; }
};

inline constexpr const char* kTraceHeader = "t,policy,seed,regret,cum_regret,weight,dz_norm,arrivals,invisible,flipped,delay";

std::string trace_filename(const std::string& policy, std::uint64_t seed);

// Writes the CSV atomically (temporary file, then rename).
void write_trace_csv(const RunTrace& trace, const std::string& path);
// Reads rows and the (policy, seed) columns; throws naming file and row on malformed input.
RunTrace read_trace_csv(const std::string& path);

void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace rcdp
