#include "rcdp/summary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rcdp {

std::vector<SummaryRow> summarize(const std::vector<RunTrace>& traces) {
  std::vector<std::string> order;
  for (const auto& tr : traces) {
    if (std::find(order.begin(), order.end(), tr.meta.policy) == order.end()) order.push_back(tr.meta.policy);
  }
  std::vector<SummaryRow> out;
  for (const auto& p : order) {
    std::vector<const RunTrace*> runs;
    for (const auto& tr : traces) {
      if (tr.meta.policy == p) runs.push_back(&tr);
    }
    const int T = static_cast<int>(runs.front()->rows.size());
    for (const RunTrace* r : runs) {
      if (static_cast<int>(r->rows.size()) != T) throw std::runtime_error("traces of " + p + " differ in length");
    }
    if (T == 0) continue;
    std::vector<int> checkpoints{std::max(1, T / 4), std::max(1, T / 2), T};
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
    for (int c : checkpoints) {
      double sum = 0.0, sq = 0.0;
      for (const RunTrace* r : runs) {
        const double v = r->rows[c - 1].cum_regret;
        sum += v;
        sq += v * v;
      }
      const double n = static_cast<double>(runs.size());
      const double mean = sum / n;
      out.push_back({p, c, mean, std::sqrt(std::max(0.0, sq / n - mean * mean)), static_cast<int>(runs.size())});
    }
  }
  return out;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path) {
  std::string buf = std::string(kSummaryHeader) + "\n";
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%s,%d,%.17g,%.17g,%d\n", r.policy.c_str(), r.checkpoint, r.mean, r.std, r.runs);
    buf += line;
  }
  write_file_atomic(path, buf);
}

std::vector<SummaryRow> read_summary_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open summary " + path);
  std::string line;
  if (!std::getline(in, line) || line != kSummaryHeader) throw std::runtime_error(path + ": row 1: unexpected header");
  std::vector<SummaryRow> out;
  int rowno = 1;
  while (std::getline(in, line)) {
    ++rowno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<std::string> f;
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 5) throw std::runtime_error(path + ": row " + std::to_string(rowno) + ": expected 5 fields");
    try {
      out.push_back({f[0], std::stoi(f[1]), std::stod(f[2]), std::stod(f[3]), std::stoi(f[4])});
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ": row " + std::to_string(rowno) + ": malformed value (" + e.what() + ")");
    }
  }
  return out;
}

std::vector<RunTrace> load_trace_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && name.rfind("trace_", 0) == 0 && e.path().extension() == ".csv") {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<RunTrace> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(read_trace_csv(f.string()));
  return out;
}

std::vector<double> mean_curve(const std::vector<RunTrace>& traces, const std::string& policy) {
  std::vector<double> acc;
  int n = 0;
  for (const auto& tr : traces) {
    if (tr.meta.policy != policy) continue;
    if (acc.empty()) acc.assign(tr.rows.size(), 0.0);
    if (tr.rows.size() != acc.size()) throw std::runtime_error("traces of " + policy + " differ in length");
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += tr.rows[i].cum_regret;
    ++n;
  }
  for (double& v : acc) v /= n;
  return acc;
}

}  // namespace rcdp
