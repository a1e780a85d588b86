#include "rcdp/trace.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rcdp {

std::string trace_filename(const std::string& policy, std::uint64_t seed) {
  return "trace_" + policy + "_seed" + std::to_string(seed) + ".csv";
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
  std::string buf;
  buf.reserve(trace.rows.size() * 96 + 128);
  buf += kTraceHeader;
  buf += '\n';
  char line[512];
  for (const auto& r : trace.rows) {
    std::snprintf(line, sizeof line, "%d,%s,%llu,%.17g,%.17g,%.17g,%.17g,%d,%d,%d,%ld\n", r.t,
                  trace.meta.policy.c_str(), static_cast<unsigned long long>(trace.meta.seed), r.regret,
                  r.cum_regret, r.weight, r.dz_norm, r.arrivals, r.invisible, r.flipped, r.delay);
    buf += line;
  }
  write_file_atomic(path, buf);
}

RunTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace " + path);
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw std::runtime_error(path + ": row 1: unexpected header");
  }
  RunTrace tr;
  int rowno = 1;
  while (std::getline(in, line)) {
    ++rowno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 11) {
      throw std::runtime_error(path + ": row " + std::to_string(rowno) + ": expected 11 fields, got " +
                               std::to_string(f.size()));
    }
    try {
      std::size_t pos = 0;
      auto num = [&](const std::string& s) {
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
      };
      TraceRow r;
      r.t = static_cast<int>(num(f[0]));
      if (tr.rows.empty()) {
        tr.meta.policy = f[1];
        tr.meta.seed = std::stoull(f[2]);
      }
      r.regret = num(f[3]);
      r.cum_regret = num(f[4]);
      r.weight = num(f[5]);
      r.dz_norm = num(f[6]);
      r.arrivals = static_cast<int>(num(f[7]));
      r.invisible = static_cast<int>(num(f[8]));
      r.flipped = static_cast<int>(num(f[9]));
      r.delay = static_cast<long>(num(f[10]));
      tr.rows.push_back(r);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ": row " + std::to_string(rowno) + ": malformed value (" + e.what() + ")");
    }
  }
  return tr;
}

}  // namespace rcdp
