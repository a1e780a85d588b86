#include "rcdp/check.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>

#include <json.hpp>

#include "rcdp/estimator.hpp"
#include "rcdp/summary.hpp"

namespace rcdp {

namespace {

constexpr double kTol = 1e-9;

struct Reporter {
  const RunTrace& tr;
  CheckReport& rep;
  void operator()(const std::string& inv, int t, const std::string& detail) const {
    rep.violations.push_back(tr.meta.policy + " seed " + std::to_string(tr.meta.seed) + ": '" + inv + "' at round " +
                             std::to_string(t) + ": " + detail);
  }
};

}  // namespace

void check_trace(const RunTrace& tr, CheckReport& report) {
  ++report.runs_checked;
  const Reporter fail{tr, report};
  const auto& rows = tr.rows;
  const int T = static_cast<int>(rows.size());
  const bool weighted = std::isfinite(tr.meta.alpha);
  const bool strategic = tr.meta.delay_regime == "strategic";
  const double cap = std::sqrt(2.0 * double(tr.meta.delay_budget));

  std::vector<int> arrivals_at(T + 2, 0);
  long flips = 0, delay_sum = 0;
  double cum = 0.0, potential = 0.0;
  for (int i = 0; i < T; ++i) {
    const TraceRow& r = rows[i];
    const int t = i + 1;
    if (r.t != t) {
      fail("round_sequence", t, "row carries t=" + std::to_string(r.t));
      return;
    }
    if (r.regret < -kTol) fail("nonnegative_regret", t, std::to_string(r.regret));
    cum += r.regret;
    if (std::abs(cum - r.cum_regret) > 1e-7 * std::max(1.0, std::abs(cum))) {
      fail("cumulative_regret", t, "recorded " + std::to_string(r.cum_regret) + " vs " + std::to_string(cum));
    }
    if (!(r.weight > 0.0 && r.weight <= 1.0 + kTol)) fail("weight_range", t, std::to_string(r.weight));
    if (weighted) {
      const double expect = r.dz_norm > 0.0 ? std::min(1.0, tr.meta.alpha / r.dz_norm) : 1.0;
      if (std::abs(r.weight - expect) > 1e-7) fail("clipping_weight", t, std::to_string(r.weight));
      if (r.weight < 1.0 && r.weight * r.dz_norm > tr.meta.alpha * (1.0 + 1e-7)) {
        fail("soft_constraint", t, "||w dz|| exceeds alpha");
      }
    } else if (std::abs(r.weight - 1.0) > kTol) {
      fail("unit_weight", t, std::to_string(r.weight));
    }
    potential += std::min(1.0, r.weight * r.dz_norm * r.dz_norm);
    if (r.delay < 0) fail("nonnegative_delay", t, std::to_string(r.delay));
    if (r.flipped != 0 && r.flipped != 1) fail("flip_flag", t, std::to_string(r.flipped));
    flips += r.flipped;
    delay_sum += r.delay;
    if (flips > tr.meta.corruption_budget) fail("corruption_budget", t, std::to_string(flips));
    if (strategic && delay_sum > tr.meta.delay_budget) fail("delay_budget", t, std::to_string(delay_sum));
    const long arrive = t + std::max(0L, r.delay);
    if (arrive <= T) ++arrivals_at[arrive];
  }

  // D_t = #{s < t : s + tau_s > t}: round s is invisible on [s + 1, s + tau_s - 1].
  std::vector<int> diff(T + 2, 0);
  for (int s = 1; s <= T; ++s) {
    const long last = std::min<long>(T, s + rows[s - 1].delay - 1);
    if (last >= s + 1) {
      ++diff[s + 1];
      --diff[last + 1];
    }
  }
  int open = 0;
  for (int t = 1; t <= T; ++t) {
    open += diff[t];
    const TraceRow& r = rows[t - 1];
    if (r.invisible != open) {
      fail("invisible_count", t, "recorded " + std::to_string(r.invisible) + " vs " + std::to_string(open));
    }
    if (strategic && open > cap + kTol) fail("invisible_feedback_bound", t, std::to_string(open));
    if (r.arrivals != arrivals_at[t]) {
      fail("arrival_count", t, "recorded " + std::to_string(r.arrivals) + " vs " + std::to_string(arrivals_at[t]));
    }
  }

  if (flips != tr.meta.corruptions_spent) fail("corruption_accounting", T, std::to_string(flips));
  if (tr.meta.phantom && T > 0) {
    const double bound = elliptic_potential_bound(tr.meta.dim, T, tr.meta.kappa, tr.meta.lambda);
    if (potential > bound) fail("elliptic_potential", T, std::to_string(potential) + " > " + std::to_string(bound));
  }
}

CheckReport check_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  CheckReport report;
  const fs::path root(dir);
  std::ifstream in(root / "manifest.json");
  if (!in) {
    report.violations.push_back("missing manifest.json in " + dir);
    return report;
  }
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const std::exception& e) {
    report.violations.push_back(std::string("manifest.json: ") + e.what());
    return report;
  }
  std::vector<RunTrace> traces;
  for (const auto& r : manifest.at("runs")) {
    RunTrace tr;
    try {
      tr = read_trace_csv((root / r.at("trace").get<std::string>()).string());
    } catch (const std::exception& e) {
      report.violations.push_back(e.what());
      continue;
    }
    RunMeta& m = tr.meta;
    if (m.policy != r.at("policy").get<std::string>() || m.seed != r.at("seed").get<std::uint64_t>()) {
      report.violations.push_back("trace " + r.at("trace").get<std::string>() + " does not match its manifest entry");
    }
    m.dim = r.at("dim").get<int>();
    m.alpha = r.at("alpha").is_null() ? std::numeric_limits<double>::infinity() : r.at("alpha").get<double>();
    m.kappa = r.at("kappa").get<double>();
    m.lambda = r.at("lambda").get<double>();
    m.phantom = r.at("phantom").get<bool>();
    m.corruption_budget = r.at("corruption_budget").get<long>();
    m.delay_regime = r.at("delay_regime").get<std::string>();
    m.delay_budget = r.at("delay_budget").get<long>();
    m.corruptions_spent = r.at("corruptions_spent").get<long>();
    m.delay_spent = r.at("delay_spent").get<long>();
    check_trace(tr, report);
    traces.push_back(std::move(tr));
  }

  const fs::path summary_path = root / "summary.csv";
  if (fs::exists(summary_path) && !traces.empty()) {
    try {
      const auto stored = read_summary_csv(summary_path.string());
      const auto fresh = summarize(traces);
      // Row order depends on who wrote the file; match rows by key.
      std::map<std::pair<std::string, int>, double> expect;
      for (const auto& r : fresh) expect[{r.policy, r.checkpoint}] = r.mean;
      bool same = stored.size() == fresh.size();
      for (const auto& r : stored) {
        auto it = expect.find({r.policy, r.checkpoint});
        same = same && it != expect.end() && std::abs(r.mean - it->second) <= 1e-9 * std::max(1.0, std::abs(it->second));
      }
      if (!same) report.violations.push_back("summary.csv disagrees with the traces");
    } catch (const std::exception& e) {
      report.violations.push_back(e.what());
    }
  }
  return report;
}

}  // namespace rcdp
