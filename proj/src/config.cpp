#include "rcdp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "rcdp/link.hpp"

namespace rcdp {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError("invalid value for '" + key + "': '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("invalid boolean for '" + key + "': '" + v + "'");
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double AdversaryConfig::delay_complexity() const {
  double d = 1.0;
  if (regime == DelayRegime::Strategic) d = std::max(d, std::sqrt(double(delay_budget)));
  if (regime == DelayRegime::Stochastic) d = std::max(d, delay_mean);
  return d;
}

void ExperimentConfig::validate() const {
  env.validate();
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (policies.empty()) throw ConfigError("at least one policy is required");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must be in (0, 1)");
  if (!(c_mult > 0.0)) throw ConfigError("c_mult must be > 0");
  if (adversary.corruption_budget < 0) throw ConfigError("corruption_budget must be >= 0");
  if (adversary.delay_budget < 0) throw ConfigError("delay_budget must be >= 0");
  if (!(adversary.delay_std >= 0.0)) throw ConfigError("delay_std must be >= 0");
  if (alpha_override && !(*alpha_override > 0.0)) throw ConfigError("alpha must be > 0");
  if (kappa && !(*kappa > 0.0)) throw ConfigError("kappa must be > 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

double ExperimentConfig::effective_kappa() const { return kappa ? *kappa : kappa_for_margin(M); }

double ExperimentConfig::exploration_mult(PolicyType p) const {
  auto it = c_mult_per_policy.find(p);
  return it != c_mult_per_policy.end() ? it->second : c_mult;
}

PolicyParams ExperimentConfig::policy_params(PolicyType p, std::uint64_t seed, double feature_scale) const {
  PolicyKind kind;
  kind.type = p;
  kind.uses_postserving = p == PolicyType::RcdpUcb ? rcdp_uses_postserving : baselines_use_postserving;
  kind.exploration_mult = exploration_mult(p);
  const int dy = post_dim(env.mapping, env.dx, env.dy);
  PolicyParams params = theory_params(kind, env.dx, dy, lambda, effective_kappa(), delta,
                                      double(adversary.corruption_budget), adversary.delay_complexity(),
                                      alpha_override);
  params.M = M;
  params.mle = mle;
  params.approximator = approximator;
  params.approximator.input_scale = 1.0 / feature_scale;
  params.seed = seed;
  return params;
}

std::map<std::string, std::string> ExperimentConfig::to_kv() const {
  KeyValues kv;
  kv["name"] = name;
  kv["T"] = std::to_string(env.T);
  kv["dx"] = std::to_string(env.dx);
  kv["dy"] = std::to_string(env.dy);
  kv["K"] = std::to_string(env.K);
  kv["mapping"] = std::string(to_string(env.mapping));
  kv["noise_std"] = fmt_double(env.noise_std);
  kv["corruption_budget"] = std::to_string(adversary.corruption_budget);
  kv["corruption_strategy"] = std::string(to_string(adversary.strategy));
  kv["corrupted_immediate"] = adversary.corrupted_immediate ? "true" : "false";
  kv["delay"] = std::string(to_string(adversary.regime));
  kv["delay_budget"] = std::to_string(adversary.delay_budget);
  kv["delay_mean"] = fmt_double(adversary.delay_mean);
  kv["delay_std"] = fmt_double(adversary.delay_std);
  std::string pol;
  for (auto p : policies) pol += (pol.empty() ? "" : ",") + std::string(to_string(p));
  kv["policies"] = pol;
  kv["rcdp_uses_postserving"] = rcdp_uses_postserving ? "true" : "false";
  kv["baselines_use_postserving"] = baselines_use_postserving ? "true" : "false";
  kv["runs"] = std::to_string(runs);
  kv["seed0"] = std::to_string(seed0);
  if (!output_dir.empty()) kv["output_dir"] = output_dir;
  if (alpha_override) kv["alpha"] = fmt_double(*alpha_override);
  kv["c_mult"] = fmt_double(c_mult);
  for (const auto& [p, v] : c_mult_per_policy) kv["c_mult." + std::string(to_string(p))] = fmt_double(v);
  kv["lambda"] = fmt_double(lambda);
  kv["delta"] = fmt_double(delta);
  kv["M"] = fmt_double(M);
  if (kappa) kv["kappa"] = fmt_double(*kappa);
  kv["mle"] = std::string(to_string(mle));
  kv["approximator"] = std::string(to_string(approximator.type));
  kv["approx_lambda"] = fmt_double(approximator.ridge_lambda);
  kv["num_features"] = std::to_string(approximator.num_features);
  kv["bandwidth"] = fmt_double(approximator.bandwidth);
  kv["mlp_hidden"] = std::to_string(approximator.hidden1) + "," + std::to_string(approximator.hidden2);
  kv["mlp_lr"] = fmt_double(approximator.lr);
  kv["mlp_epochs"] = std::to_string(approximator.epochs_per_round);
  kv["threads"] = std::to_string(threads);
  kv["heavy_check_every"] = std::to_string(heavy_check_every);
  return kv;
}

KeyValues parse_key_values(const std::string& text, const std::string& source) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str(), path);
}

ExperimentConfig config_from_kv(const KeyValues& kv) {
  ExperimentConfig c;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"name", [&](auto&, auto& v) { c.name = v; }},
      {"T", [&](auto& k, auto& v) { c.env.T = parse_number<int>(k, v); }},
      {"dx", [&](auto& k, auto& v) { c.env.dx = parse_number<int>(k, v); }},
      {"dy", [&](auto& k, auto& v) { c.env.dy = parse_number<int>(k, v); }},
      {"K", [&](auto& k, auto& v) { c.env.K = parse_number<int>(k, v); }},
      {"mapping", [&](auto&, auto& v) { c.env.mapping = parse_mapping(v); }},
      {"noise_std", [&](auto& k, auto& v) { c.env.noise_std = parse_number<double>(k, v); }},
      {"corruption_budget", [&](auto& k, auto& v) { c.adversary.corruption_budget = parse_number<long>(k, v); }},
      {"corruption_strategy", [&](auto&, auto& v) { c.adversary.strategy = parse_corruption_strategy(v); }},
      {"corrupted_immediate", [&](auto& k, auto& v) { c.adversary.corrupted_immediate = parse_bool(k, v); }},
      {"delay", [&](auto&, auto& v) { c.adversary.regime = parse_delay_regime(v); }},
      {"delay_budget", [&](auto& k, auto& v) { c.adversary.delay_budget = parse_number<long>(k, v); }},
      {"delay_mean", [&](auto& k, auto& v) { c.adversary.delay_mean = parse_number<double>(k, v); }},
      {"delay_std", [&](auto& k, auto& v) { c.adversary.delay_std = parse_number<double>(k, v); }},
      {"policies",
       [&](auto&, auto& v) {
         c.policies.clear();
         for (const auto& p : split_list(v)) c.policies.push_back(parse_policy(p));
       }},
      {"rcdp_uses_postserving", [&](auto& k, auto& v) { c.rcdp_uses_postserving = parse_bool(k, v); }},
      {"baselines_use_postserving", [&](auto& k, auto& v) { c.baselines_use_postserving = parse_bool(k, v); }},
      {"runs", [&](auto& k, auto& v) { c.runs = parse_number<int>(k, v); }},
      {"seed0", [&](auto& k, auto& v) { c.seed0 = parse_number<std::uint64_t>(k, v); }},
      {"output_dir", [&](auto&, auto& v) { c.output_dir = v; }},
      {"alpha", [&](auto& k, auto& v) { c.alpha_override = parse_number<double>(k, v); }},
      {"c_mult", [&](auto& k, auto& v) { c.c_mult = parse_number<double>(k, v); }},
      {"lambda", [&](auto& k, auto& v) { c.lambda = parse_number<double>(k, v); }},
      {"delta", [&](auto& k, auto& v) { c.delta = parse_number<double>(k, v); }},
      {"M", [&](auto& k, auto& v) { c.M = parse_number<double>(k, v); }},
      {"kappa", [&](auto& k, auto& v) { c.kappa = parse_number<double>(k, v); }},
      {"mle", [&](auto&, auto& v) { c.mle = parse_mle_mode(v); }},
      {"approximator", [&](auto&, auto& v) { c.approximator.type = parse_approximator(v); }},
      {"approx_lambda", [&](auto& k, auto& v) { c.approximator.ridge_lambda = parse_number<double>(k, v); }},
      {"num_features", [&](auto& k, auto& v) { c.approximator.num_features = parse_number<int>(k, v); }},
      {"bandwidth", [&](auto& k, auto& v) { c.approximator.bandwidth = parse_number<double>(k, v); }},
      {"mlp_hidden",
       [&](auto& k, auto& v) {
         const auto parts = split_list(v);
         if (parts.size() != 2) throw ConfigError("mlp_hidden expects two comma-separated sizes");
         c.approximator.hidden1 = parse_number<int>(k, parts[0]);
         c.approximator.hidden2 = parse_number<int>(k, parts[1]);
       }},
      {"mlp_lr", [&](auto& k, auto& v) { c.approximator.lr = parse_number<double>(k, v); }},
      {"mlp_epochs", [&](auto& k, auto& v) { c.approximator.epochs_per_round = parse_number<int>(k, v); }},
      {"threads", [&](auto& k, auto& v) { c.threads = parse_number<int>(k, v); }},
      {"heavy_check_every", [&](auto& k, auto& v) { c.heavy_check_every = parse_number<int>(k, v); }},
      {"sweep_mode", [&](auto&, auto&) {}},
  };
  for (const auto& [key, value] : kv) {
    if (key.rfind("c_mult.", 0) == 0) {
      c.c_mult_per_policy[parse_policy(key.substr(7))] = parse_number<double>(key, value);
      continue;
    }
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key: '" + key + "'");
    try {
      it->second(key, value);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
  c.validate();
  return c;
}

ExperimentConfig parse_config(const std::string& text) { return config_from_kv(parse_key_values(text)); }

ExperimentConfig load_config(const std::string& path) { return config_from_kv(read_key_values(path)); }

const std::vector<std::string>& sweepable_keys() {
  static const std::vector<std::string> keys = {"T",          "dx",           "dy",         "K",
                                                "mapping",    "noise_std",    "corruption_budget",
                                                "delay",      "delay_budget", "delay_mean", "delay_std",
                                                "c_mult"};
  return keys;
}

std::vector<SweepPoint> expand_sweep(const KeyValues& kv) {
  std::string mode = "product";
  if (auto it = kv.find("sweep_mode"); it != kv.end()) mode = it->second;
  if (mode != "product" && mode != "one_at_a_time") throw ConfigError("sweep_mode must be product or one_at_a_time");

  std::vector<std::pair<std::string, std::vector<std::string>>> lists;
  for (const auto& key : sweepable_keys()) {
    auto it = kv.find(key);
    if (it == kv.end()) continue;
    auto vals = split_list(it->second);
    if (vals.size() > 1) lists.emplace_back(key, std::move(vals));
  }

  const std::string base_out = kv.count("output_dir") ? kv.at("output_dir") : std::string();
  auto make_point = [&](const std::vector<std::pair<std::string, std::string>>& chosen, const std::string& label) {
    KeyValues point = kv;
    point.erase("sweep_mode");
    for (const auto& [k, v] : lists) point[k] = v.front();
    for (const auto& [k, v] : chosen) point[k] = v;
    if (!base_out.empty()) point["output_dir"] = base_out + "/" + label;
    SweepPoint sp;
    sp.label = label;
    sp.config = config_from_kv(point);
    if (kv.count("name")) sp.config.name = kv.at("name") + "/" + label;
    return sp;
  };

  std::vector<SweepPoint> out;
  if (lists.empty()) {
    out.push_back(make_point({}, "base"));
    return out;
  }
  if (mode == "one_at_a_time") {
    std::vector<std::string> seen;
    for (const auto& [key, vals] : lists) {
      for (const auto& v : vals) {
        std::vector<std::pair<std::string, std::string>> chosen = {{key, v}};
        // Label by the full point so shared base points are generated once.
        std::string full;
        for (const auto& [k2, v2] : lists) full += k2 + "=" + (k2 == key ? v : v2.front()) + "_";
        if (std::find(seen.begin(), seen.end(), full) != seen.end()) continue;
        seen.push_back(full);
        out.push_back(make_point(chosen, key + "=" + v));
      }
    }
    return out;
  }
  std::vector<std::size_t> idx(lists.size(), 0);
  while (true) {
    std::vector<std::pair<std::string, std::string>> chosen;
    std::string label;
    for (std::size_t i = 0; i < lists.size(); ++i) {
      chosen.emplace_back(lists[i].first, lists[i].second[idx[i]]);
      label += (label.empty() ? "" : "_") + lists[i].first + "=" + lists[i].second[idx[i]];
    }
    out.push_back(make_point(chosen, label));
    std::size_t i = 0;
    for (; i < lists.size(); ++i) {
      if (++idx[i] < lists[i].second.size()) break;
      idx[i] = 0;
    }
    if (i == lists.size()) break;
  }
  return out;
}

}  // namespace rcdp
