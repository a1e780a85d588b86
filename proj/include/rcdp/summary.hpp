#pragma once

#include <string>
#include <vector>

#include "rcdp/trace.hpp"

namespace rcdp {

struct SummaryRow {
  std::string policy;
  int checkpoint = 0;  // round index
  double mean = 0.0;
  double std = 0.0;  // population std across runs
  int runs = 0;
};

// Cumulative regret at T/4, T/2 and T, per policy (policies in first-seen order).
std::vector<SummaryRow> summarize(const std::vector<RunTrace>& traces);

inline constexpr const char* kSummaryHeader = "policy,checkpoint,mean_cum_regret,std_cum_regret,runs";

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path);
std::vector<SummaryRow> read_summary_csv(const std::string& path);

// All trace_*.csv files of a directory, sorted by file name.
std::vector<RunTrace> load_trace_dir(const std::string& dir);

// Mean cumulative regret curve of one policy.
std::vector<double> mean_curve(const std::vector<RunTrace>& traces, const std::string& policy);

}  // namespace rcdp
