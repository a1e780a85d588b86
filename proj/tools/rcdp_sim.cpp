// rcdp_sim: run, sweep, summarize and check dueling-bandit experiments.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rcdp/check.hpp"
#include "rcdp/config.hpp"
#include "rcdp/runner.hpp"
#include "rcdp/summary.hpp"

namespace {

constexpr int kExitInvariant = 2;
constexpr int kExitError = 1;

struct Overrides {
  int seeds = 0;
  std::string out;
  std::string policies;
  int threads = 0;
};

std::string default_output_dir(const std::string& name) {
  const char* env = std::getenv("RCDP_OUTPUT_DIR");
  const std::string root = (env && *env) ? env : "results";
  return (std::filesystem::path(root) / name).string();
}

rcdp::KeyValues with_overrides(rcdp::KeyValues kv, const Overrides& o) {
  if (o.seeds > 0) kv["runs"] = std::to_string(o.seeds);
  if (!o.policies.empty()) kv["policies"] = o.policies;
  if (o.threads > 0) kv["threads"] = std::to_string(o.threads);
  if (!o.out.empty()) {
    kv["output_dir"] = o.out;
  } else if (!kv.count("output_dir")) {
    kv["output_dir"] = default_output_dir(kv.count("name") ? kv.at("name") : "experiment");
  }
  return kv;
}

void print_summary(const std::vector<rcdp::SummaryRow>& rows) {
  std::printf("%-12s %10s %16s %14s %6s\n", "policy", "round", "mean_cum_regret", "std", "runs");
  for (const auto& r : rows) {
    std::printf("%-12s %10d %16.4f %14.4f %6d\n", r.policy.c_str(), r.checkpoint, r.mean, r.std, r.runs);
  }
}

int run_config(const rcdp::ExperimentConfig& cfg) {
  std::fprintf(stderr, "[%s] %zu policies x %d runs, T=%d -> %s\n", cfg.name.c_str(), cfg.policies.size(), cfg.runs,
               cfg.env.T, cfg.output_dir.c_str());
  const auto traces = rcdp::run_experiment(cfg);
  print_summary(rcdp::summarize(traces));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corruption- and delay-robust contextual dueling bandit simulator"};
  app.require_subcommand(1);
  Overrides ov;
  std::string path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", path, "Experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seeds", ov.seeds, "Runs per policy")->check(CLI::PositiveNumber);
    sub->add_option("--out", ov.out, "Output directory (default: $RCDP_OUTPUT_DIR/<name> or results/<name>)");
    sub->add_option("--policy", ov.policies, "Comma-separated policies: rcdp_ucb,rcdb,colstim,maxinp,maxpairucb");
    sub->add_option("--threads", ov.threads, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto* run = app.add_subcommand("run", "Run one experiment config");
  add_common(run);
  auto* sweep = app.add_subcommand("sweep", "Run every point of a sweep config");
  add_common(sweep);
  auto* summarize = app.add_subcommand("summarize", "Summarize the traces in a results directory");
  summarize->add_option("dir", path)->required()->check(CLI::ExistingDirectory);
  auto* check = app.add_subcommand("check", "Re-check invariants of a results directory");
  check->add_option("dir", path)->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      return run_config(rcdp::config_from_kv(with_overrides(rcdp::read_key_values(path), ov)));
    }
    if (*sweep) {
      const auto points = rcdp::expand_sweep(with_overrides(rcdp::read_key_values(path), ov));
      for (const auto& p : points) run_config(p.config);
      return 0;
    }
    if (*summarize) {
      const auto rows = rcdp::summarize(rcdp::load_trace_dir(path));
      print_summary(rows);
      rcdp::write_summary_csv(rows, (std::filesystem::path(path) / "summary.csv").string());
      return 0;
    }
    if (*check) {
      const auto report = rcdp::check_directory(path);
      const std::size_t shown = std::min<std::size_t>(report.violations.size(), 20);
      for (std::size_t i = 0; i < shown; ++i) std::cerr << "FAIL " << report.violations[i] << "\n";
      if (shown < report.violations.size()) std::cerr << "... " << report.violations.size() - shown << " more\n";
      std::printf("%d runs checked, %zu violations\n", report.runs_checked, report.violations.size());
      return report.ok() ? 0 : kExitInvariant;
    }
  } catch (const rcdp::InvariantViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
