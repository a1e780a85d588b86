#include "rcdp/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "rcdp/link.hpp"
#include "rcdp/summary.hpp"

#ifndef RCDP_GIT_DESCRIBE
#define RCDP_GIT_DESCRIBE "unknown"
#endif

namespace rcdp {

std::string git_describe() { return RCDP_GIT_DESCRIBE; }

namespace {

constexpr double kTol = 1e-9;

void heavy_checks(const EstimatorState& est, int t) {
  const Matrix diff = est.V().mat() - est.W().mat();
  const double min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(diff, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (min_eig < -1e-9 * std::max(1.0, max_abs(est.V().mat()))) {
    throw InvariantViolation("psd_order_V_W", t, "min eigenvalue of V - W = " + std::to_string(min_eig));
  }
  for (const SpdMatrixd* m : {&est.V(), &est.W()}) {
    const Eigen::Index d = m->dim();
    const double err = max_abs(m->mat() * m->inv() - Matrix::Identity(d, d));
    if (err > 1e-6) throw InvariantViolation("inverse_accuracy", t, "||mat*inv - I||_max = " + std::to_string(err));
  }
}

}  // namespace

RunTrace run_single(const ExperimentConfig& cfg, PolicyType ptype, std::uint64_t seed, RoundObserver* observer) {
  const auto start = std::chrono::steady_clock::now();
  EnvConfig ec = cfg.env;
  ec.seed = seed;
  const Environment env(ec);
  DuelingPolicy policy(cfg.policy_params(ptype, seed, env.scale()));
  const PolicyParams& pp = policy.params();

  CorruptionPolicy corruption(cfg.adversary.corruption_budget, cfg.adversary.strategy);
  DelayPolicy delays = DelayPolicy::none();
  if (cfg.adversary.regime == DelayRegime::Stochastic) {
    delays = DelayPolicy::stochastic(cfg.adversary.delay_mean, cfg.adversary.delay_std, seed);
  } else if (cfg.adversary.regime == DelayRegime::Strategic) {
    delays = DelayPolicy::strategic(cfg.adversary.delay_budget);
  }
  FeedbackQueue queue;

  RunTrace trace;
  trace.meta.policy = std::string(to_string(ptype));
  trace.meta.seed = seed;
  trace.meta.dim = pp.dim();
  trace.meta.alpha = pp.alpha;
  trace.meta.kappa = pp.kappa;
  trace.meta.lambda = pp.lambda;
  trace.meta.phantom = pp.basis == WeightBasis::Phantom;
  trace.meta.corruption_budget = cfg.adversary.corruption_budget;
  trace.meta.delay_regime = std::string(to_string(cfg.adversary.regime));
  trace.meta.delay_budget = cfg.adversary.delay_budget;
  trace.rows.reserve(cfg.env.T);

  const bool weighted = std::isfinite(pp.alpha);
  const double invisible_cap = std::sqrt(2.0 * double(cfg.adversary.delay_budget));
  double cum = 0.0;
  double potential = 0.0;

  for (int t = 1; t <= cfg.env.T; ++t) {
    const RoundContexts ctx = env.sample_round(t);
    const std::vector<Vector> zhat = policy.features(ctx);
    DuelChoice choice = policy.select(t, zhat);
    const FeedbackRecord& rec = policy.observe(t, ctx, choice);
    const double weight = rec.weight;
    const double norm = rec.norm;

    if (weighted) {
      const double expect = norm > 0.0 ? std::min(1.0, pp.alpha / norm) : 1.0;
      if (std::abs(weight - expect) > kTol) {
        throw InvariantViolation("clipping_weight", t, "weight " + std::to_string(weight) + " != " +
                                                           std::to_string(expect));
      }
      if (weight < 1.0 && weight * norm > pp.alpha * (1.0 + kTol)) {
        throw InvariantViolation("soft_constraint", t, "||w dz|| exceeds alpha");
      }
      const double scaled = std::sqrt(weight) * norm;
      if (std::abs(scaled - std::min(norm, std::sqrt(pp.alpha * norm))) > kTol * std::max(1.0, norm)) {
        throw InvariantViolation("soft_constraint", t, "||sqrt(w) dz|| != min(||dz||, sqrt(alpha ||dz||))");
      }
    }
    potential += std::min(1.0, weight * norm * norm);

    CounterRng orng(seed, Stream::Outcome, static_cast<std::uint64_t>(t));
    const Vector za = ctx.joint_observed(choice.a);
    const Vector zb = ctx.joint_observed(choice.b);
    const double margin = env.theta_star().dot(za - zb);
    const int truth = orng.uniform() < logistic(margin) ? 1 : 0;
    const int observed = corruption.corrupt(t, truth, margin);
    const int flipped = observed != truth ? 1 : 0;
    long tau = 0;
    if (!(flipped && cfg.adversary.corrupted_immediate)) tau = delays.assign_delay(t);
    queue.push(t, tau, observed);

    const auto arrivals = queue.tick(t);
    for (const auto& a : arrivals) policy.arrive(a.round, a.outcome);
    policy.end_round();

    std::vector<Vector> zstar;
    zstar.reserve(ctx.pre.size());
    for (int k = 0; k < static_cast<int>(ctx.pre.size()); ++k) zstar.push_back(ctx.joint_true(k));
    const double r = instantaneous_regret(env.theta_star(), zstar, choice);
    cum += r;

    const int invisible = queue.invisible(t);
    if (corruption.spent() > cfg.adversary.corruption_budget) {
      throw InvariantViolation("corruption_budget", t, "spent " + std::to_string(corruption.spent()));
    }
    if (delays.regime() == DelayRegime::Strategic) {
      if (delays.spent() > cfg.adversary.delay_budget) {
        throw InvariantViolation("delay_budget", t, "spent " + std::to_string(delays.spent()));
      }
      if (invisible > invisible_cap + kTol) {
        throw InvariantViolation("invisible_feedback_bound", t,
                                 "D_t = " + std::to_string(invisible) + " > sqrt(2 Lambda)");
      }
    }
    if (!policy.estimator().theta().allFinite()) throw InvariantViolation("finite_theta", t, "non-finite theta");
    if (cfg.heavy_check_every > 0 && (t % cfg.heavy_check_every == 0 || t == cfg.env.T)) {
      heavy_checks(policy.estimator(), t);
    }

    trace.rows.push_back(TraceRow{t, r, cum, weight, norm, static_cast<int>(arrivals.size()), invisible, flipped, tau});
    if (observer) observer->after_round(t, policy, env);
  }

  if (trace.meta.phantom) {
    const double bound = elliptic_potential_bound(pp.dim(), cfg.env.T, pp.kappa, pp.lambda);
    if (potential > bound) {
      throw InvariantViolation("elliptic_potential", cfg.env.T,
                               std::to_string(potential) + " > " + std::to_string(bound));
    }
  }
  trace.meta.corruptions_spent = corruption.spent();
  trace.meta.delay_spent = delays.spent();
  trace.meta.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

std::vector<RunTrace> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Task {
    PolicyType policy;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (PolicyType p : cfg.policies) {
    for (int r = 0; r < cfg.runs; ++r) tasks.push_back({p, cfg.seed0 + static_cast<std::uint64_t>(r)});
  }
  std::vector<RunTrace> traces(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        traces[i] = run_single(cfg, tasks[i].policy, tasks[i].seed);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(tasks.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  if (!cfg.output_dir.empty()) persist_experiment(cfg, traces);
  return traces;
}

void persist_experiment(const ExperimentConfig& cfg, const std::vector<RunTrace>& traces) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  nlohmann::ordered_json manifest;
  manifest["name"] = cfg.name;
  manifest["git_describe"] = git_describe();
  manifest["config"] = cfg.to_kv();
  manifest["runs"] = nlohmann::ordered_json::array();
  for (const auto& tr : traces) {
    const std::string file = trace_filename(tr.meta.policy, tr.meta.seed);
    write_trace_csv(tr, (fs::path(cfg.output_dir) / file).string());
    nlohmann::ordered_json r;
    r["policy"] = tr.meta.policy;
    r["seed"] = tr.meta.seed;
    r["trace"] = file;
    r["dim"] = tr.meta.dim;
    if (std::isfinite(tr.meta.alpha)) {
      r["alpha"] = tr.meta.alpha;
    } else {
      r["alpha"] = nullptr;
    }
    r["kappa"] = tr.meta.kappa;
    r["lambda"] = tr.meta.lambda;
    r["phantom"] = tr.meta.phantom;
    r["corruption_budget"] = tr.meta.corruption_budget;
    r["delay_regime"] = tr.meta.delay_regime;
    r["delay_budget"] = tr.meta.delay_budget;
    r["corruptions_spent"] = tr.meta.corruptions_spent;
    r["delay_spent"] = tr.meta.delay_spent;
    r["wall_seconds"] = tr.meta.wall_seconds;
    manifest["runs"].push_back(std::move(r));
  }
  const auto rows = summarize(traces);
  write_summary_csv(rows, (fs::path(cfg.output_dir) / "summary.csv").string());
  write_file_atomic((fs::path(cfg.output_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

}  // namespace rcdp
