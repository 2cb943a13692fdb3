// Acceptance gate. Prints one PASS/FAIL line per criterion; exit status is
// non-zero when any selected criterion fails. `--only N` runs a single one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "CLI11.hpp"
#include "fhc/agent.hpp"
#include "fhc/commands.hpp"
#include "fhc/config.hpp"
#include "fhc/environment.hpp"
#include "fhc/evaluation.hpp"
#include "fhc/fh_core.hpp"
#include "fhc/oracle.hpp"
#include "support/bit_oracle.hpp"
#include "support/chain_task.hpp"
#include "support/grad_check.hpp"

namespace fs = std::filesystem;
using namespace fhc;

namespace {

// Tolerances and budgets.
constexpr double kRateRelTol = 1e-9;
constexpr double kFormulaBudgetS = 1.0;
constexpr double kGradRelTol = 1e-4;
constexpr double kGradBudgetS = 5.0;
constexpr double kChainQTol = 0.05;
constexpr double kChainBudgetS = 60.0;
constexpr double kOracleRelTol = 0.05;
constexpr double kViolationTarget = 1e-3;
constexpr std::size_t kMinEvalSlots = 10'000;
constexpr double kOracleBudgetS = 600.0;
constexpr double kFullLoadGainTol = 5.0;  // percentage points
constexpr double kSweepBudgetS = 3600.0;
constexpr std::size_t kSteadySteps = 50;
constexpr double kChiSquareMinP = 0.01;
constexpr int kChiSquareDraws = 100'000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(b), 1e-300); }

fs::path g_work_dir;

// Training setup shared by the environment criteria.
RunConfig agent_config(double mean_prb, double sigma_prb) {
  return default_config({
      "traffic.mean_prb=" + fmt(mean_prb, 17),
      "traffic.sigma_prb=" + fmt(sigma_prb, 17),
      "train.total_steps=30000",
      "train.temperature_decay=0.9995",
      "train.updates_per_step=2",
      "eval.episodes=5",
      "eval.episode_length=200",
      "eval.network=target",
  });
}

Outcome formula_exactness() {
  const auto t0 = Clock::now();
  const SystemConfig sys;
  const ConfigSets sets;
  const FronthaulModel model(sys, sets);
  const auto all = sets.enumerate();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> prb(0, sys.n_prb_max);
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const int n = prb(rng);
    const CompressionConfig c = all[pick(rng)];
    const Bits payload = testing::count_payload_bits(sys, n, c.q);
    const Bits weights = testing::count_weight_bits(sys, n, c.r_w, c.b_w);
    const double rate = static_cast<double>(payload + weights) / sys.t_slot_s;
    const SlotRecord r = model.record(0, 0, n, c);
    if (r.payload_bits != payload || r.weight_bits != weights) ++mismatches;
    if (!rel_close(r.rate_bps, rate, kRateRelTol) && !(rate == 0 && r.rate_bps == 0)) ++mismatches;
    if (!rel_close(r.util, rate / sys.c_fh_bps, kRateRelTol) && !(rate == 0 && r.util == 0)) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < kFormulaBudgetS,
          std::to_string(mismatches) + " mismatches over 1000 draws, " + fmt(secs, 3) + " s"};
}

Outcome reference_dimensioning() {
  const FronthaulModel model(SystemConfig{}, ConfigSets{});
  const StaticChoice c = best_static_config(model, 273, LatencyModelConfig{}, 260e-6, FeasibilityMode::capacity);
  const Bits total = 3 * model.slot_bits(273, c.config);
  const bool pass = c.config == CompressionConfig{6, 16, 4} && total == 12'450'240 &&
                    std::abs(c.aggregate_rate_bps - 24.90048e9) <= 1e-6;
  return {pass, to_string(c.config) + " aggregate " + fmt(c.aggregate_rate_bps, 12) + " b/s"};
}

Outcome gradient_correctness() {
  const auto t0 = Clock::now();
  MlpSpec spec;
  spec.input_dim = 5;
  spec.hidden_dims = {8};
  spec.output_dim = 7;
  spec.init_seed = 42;
  const Mlp net(spec);
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RowMatrix x(4, 5);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  const std::vector<std::size_t> actions{0, 2, 4, 6};
  std::vector<double> y(4), w(4);
  for (auto& v : y) v = 2 * u(rng);
  for (auto& v : w) v = 0.5 + 0.5 * std::abs(u(rng));
  const auto check = testing::check_td_gradient(net, x, actions, y, w, 1e-5);
  const double secs = seconds_since(t0);
  return {check.max_rel_error < kGradRelTol && secs < kGradBudgetS,
          "max relative error " + fmt(check.max_rel_error, 3) + " over " + std::to_string(check.parameters) +
              " parameters, " + fmt(secs, 3) + " s"};
}

Outcome ddqn_sanity() {
  const auto t0 = Clock::now();
  testing::ChainTask task(1);
  MlpSpec spec;
  spec.input_dim = testing::kChainStates;
  spec.hidden_dims = {32};
  spec.output_dim = testing::kChainActions;
  spec.init_seed = 1;
  TrainConfig cfg;
  cfg.gamma = testing::kChainGamma;
  cfg.total_steps = 20'000;
  cfg.warmup = 200;
  cfg.batch_size = 32;
  cfg.kappa = 0.01;
  cfg.seed = 1;
  cfg.exploration.decay = 0.999;
  cfg.exploration.floor = 0.05;
  cfg.optimizer.learning_rate = 5e-4;
  const TrainResult r = train(task, spec, cfg);
  const auto vi = value_iteration(testing::chain_mdp());
  bool policy_ok = true;
  double err = 0.0;
  for (std::size_t s = 0; s < testing::kChainStates; ++s) {
    const auto q = r.online.forward(testing::chain_features(s));
    for (std::size_t a = 0; a < testing::kChainActions; ++a)
      err = std::max(err, std::abs(q[static_cast<Eigen::Index>(a)] - vi.q[s][a]));
    policy_ok = policy_ok && greedy_action(std::span<const double>(q.data(), 2)) == greedy_action(vi.q[s]);
  }
  const double secs = seconds_since(t0);
  return {policy_ok && err < kChainQTol && secs < kChainBudgetS,
          std::string(policy_ok ? "optimal" : "suboptimal") + " greedy policy, max |Q - Q*| " + fmt(err, 3) + ", " +
              fmt(secs, 3) + " s"};
}

Outcome oracle_match() {
  bool pass = true;
  std::string detail;
  for (const double mean : {175.0, 273.0}) {
    const auto t0 = Clock::now();
    const RunConfig cfg = agent_config(mean, 0.0);
    const TrainResult trained = run_train(cfg, g_work_dir / ("oracle_match_" + fmt(mean)));
    const EvalReport report = evaluate(evaluation_env(cfg), trained_policy(cfg, trained),
                                       EvalOptions{cfg.eval.episodes, cfg.eval.steady_window, {}});
    const FronthaulModel model(cfg.env.system, cfg.env.sets);
    const StaticChoice best = best_static_config(model, static_cast<int>(mean), cfg.env.latency,
                                                 cfg.env.reward.tau_max_s, FeasibilityMode::latency);
    const auto& s = report.summary;
    const double rel = (s.steady_state_util - best.cell_sum_util) / best.cell_sum_util;
    const double secs = seconds_since(t0);
    const bool ok = std::abs(rel) <= kOracleRelTol && s.violation_frequency <= kViolationTarget &&
                    s.slots >= kMinEvalSlots && secs < kOracleBudgetS;
    pass = pass && ok;
    std::string finals;
    for (const auto& c : report.steps.back().info.configs) finals += " " + to_string(c);
    detail += (detail.empty() ? "" : "; ") + std::string("N=") + fmt(mean) + " util " + fmt(s.steady_state_util, 5) +
              " vs oracle " + fmt(best.cell_sum_util, 5) + " (" + fmt(100 * rel, 3) + "%), violations " +
              fmt(s.violation_frequency, 3) + " over " + std::to_string(s.slots) + " slots, " + fmt(secs, 3) +
              " s, final" + finals;
  }
  return {pass, detail};
}

Outcome utilization_sweep() {
  const auto t0 = Clock::now();
  RunConfig cfg = agent_config(175, 1.0);
  cfg.sweep_mean_prb = {50, 100, 175, 225, 273};
  const auto rows = run_sweep(cfg, g_work_dir / "sweep");
  const double secs = seconds_since(t0);
  bool above = true, monotone = true;
  std::string detail;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].mean_prb < 273) above = above && rows[i].util_drlfc > rows[i].util_ref;
    if (i > 0) monotone = monotone && rows[i].gain_percent <= rows[i - 1].gain_percent;
    detail += (i ? ", " : "") + fmt(rows[i].mean_prb) + ":" + fmt(rows[i].gain_percent, 4) + "%";
  }
  const bool full_load = !rows.empty() && rows.back().mean_prb == 273 &&
                         std::abs(rows.back().gain_percent) <= kFullLoadGainTol;
  const bool pass = rows.size() == 5 && above && monotone && full_load && secs < kSweepBudgetS;
  return {pass, "gains " + detail + "; (a) " + (above ? "ok" : "FAIL") + " (b) " + (monotone ? "ok" : "FAIL") +
                    " (c) " + (full_load ? "ok" : "FAIL") + ", " + fmt(secs, 4) + " s"};
}

Outcome staircase() {
  RunConfig cfg = agent_config(175, 1.0);
  cfg.eval.episodes = 1;
  const fs::path dir = g_work_dir / "staircase";
  const TrainResult trained = run_train(cfg, dir);
  const EvalReport report = evaluate(evaluation_env(cfg), trained_policy(cfg, trained),
                                     EvalOptions{1, cfg.eval.steady_window, {}});
  write_config_histogram_csv(dir / "config_histogram.csv", report, cfg.env.sets);

  // Read the histogram back: cells per (parameter, value) per step.
  std::ifstream in(dir / "config_histogram.csv");
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::map<std::size_t, std::map<std::string, int>> hist;
  while (std::getline(in, line)) {
    std::stringstream row(line);
    std::string episode, step, param, value, cells;
    std::getline(row, episode, ',');
    std::getline(row, step, ',');
    std::getline(row, param, ',');
    std::getline(row, value, ',');
    std::getline(row, cells, ',');
    hist[std::stoul(step)][param + "=" + value] = std::stoi(cells);
  }

  const std::size_t steps = report.steps.size();
  // The first action is applied before the first record, so the start shows
  // up as step 0 with at most one cell moved.
  int moved_at_start = 0;
  for (const auto& c : report.steps.front().info.configs) moved_at_start += c == CompressionConfig{6, 16, 4} ? 0 : 1;
  bool one_at_a_time = true;
  for (std::size_t t = 1; t < steps; ++t) {
    int changed = 0;
    for (std::size_t k = 0; k < report.steps[t].info.configs.size(); ++k)
      changed += report.steps[t].info.configs[k] == report.steps[t - 1].info.configs[k] ? 0 : 1;
    one_at_a_time = one_at_a_time && changed <= 1;
  }
  bool steady = steps > kSteadySteps;
  for (std::size_t t = steps - kSteadySteps; steady && t < steps; ++t)
    steady = report.steps[t].info.configs == report.steps[steps - 1].info.configs &&
             hist[t] == hist[steps - 1];
  const double viol = report.summary.violation_frequency;
  std::string finals;
  for (const auto& c : report.steps.back().info.configs) finals += " " + to_string(c);
  const bool pass = moved_at_start <= 1 && one_at_a_time && steady && viol <= kViolationTarget &&
                    hist.size() == steps;
  return {pass, std::string("start ") + (moved_at_start <= 1 ? "ok" : "FAIL") + ", single-cell moves " +
                    (one_at_a_time ? "ok" : "FAIL") + ", steady over final " + std::to_string(kSteadySteps) +
                    " steps " + (steady ? "ok" : "FAIL") + ", violations " + fmt(viol, 3) + ", final" + finals};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome reproducibility() {
  const RunConfig first = default_config({"train.total_steps=1500", "run.checkpoint_every=500"});
  const fs::path a = g_work_dir / "repro_a", b = g_work_dir / "repro_b";
  run_train(first, a);
  const RunConfig second = load_config(a / "manifest.ini");
  run_train(second, b);
  const std::string log_a = read_file(a / "train_log.csv"), log_b = read_file(b / "train_log.csv");
  const bool logs = !log_a.empty() && log_a == log_b;
  const bool ckpts = read_file(a / "checkpoint.json") == read_file(b / "checkpoint.json");
  const bool manifests = read_file(a / "manifest.ini") == read_file(b / "manifest.ini");
  return {logs && ckpts && manifests, std::string("training logs ") + (logs ? "identical" : "differ") +
                                          ", checkpoints " + (ckpts ? "identical" : "differ") + ", manifests " +
                                          (manifests ? "identical" : "differ") + " (" +
                                          std::to_string(log_a.size()) + " log bytes)"};
}

double chi_square_p(const std::vector<double>& counts, const std::vector<double>& probs, double n) {
  double chi2 = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) chi2 += std::pow(counts[i] - n * probs[i], 2) / (n * probs[i]);
  const boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, chi2));
}

Outcome sampling_statistics() {
  bool pass = true;
  std::string detail;

  const auto p = boltzmann_probabilities(std::vector<double>{1.0, 2.0}, 1.0);
  const bool softmax = std::abs(p[0] - 1 / (1 + std::exp(1.0))) <= 1e-15 &&
                       std::abs(p[1] - std::exp(1.0) / (1 + std::exp(1.0))) <= 1e-15;
  pass = pass && softmax;
  detail += "softmax [" + fmt(p[0], 5) + ", " + fmt(p[1], 5) + "]";

  // Empirical Boltzmann action frequencies.
  {
    const std::vector<double> q{0.3, -0.2, 1.1, 0.0, 0.7, -1.0, 0.5};
    ExplorationSchedule sched;
    sched.temperature = 0.5;
    const auto probs = boltzmann_probabilities(q, sched.temperature);
    Rng rng(11);
    std::vector<double> counts(q.size(), 0.0);
    for (int i = 0; i < kChiSquareDraws; ++i) counts[select_action(q, sched, rng)] += 1;
    const double pv = chi_square_p(counts, probs, kChiSquareDraws);
    pass = pass && pv > kChiSquareMinP;
    detail += ", action sampling p=" + fmt(pv, 3);
  }

  // Prioritized replay: p = [1, 3], alpha = 1 -> P = [0.25, 0.75].
  {
    ReplayConfig rc;
    rc.capacity = 2;
    rc.alpha = 1.0;
    rc.priority_eps = 1e-6;
    ReplayBuffer buf(rc);
    for (int i = 0; i < 2; ++i) buf.push({{0.0}, 0, 0.0, {0.0}});
    buf.update_priorities(std::vector<std::size_t>{0, 1}, std::vector<double>{1.0 - 1e-6, 3.0 - 1e-6});
    Rng rng(12);
    std::vector<double> counts(2, 0.0);
    for (int i = 0; i < kChiSquareDraws / 2; ++i)
      for (std::size_t j : buf.sample(2, rng).indices) counts[j] += 1;
    const double pv = chi_square_p(counts, {0.25, 0.75}, kChiSquareDraws);
    pass = pass && pv > kChiSquareMinP && std::abs(buf.probability(0) - 0.25) <= 1e-12;
    detail += ", replay [1,3] p=" + fmt(pv, 3);
  }

  // Equal priorities: uniform, unit weights, exactly.
  {
    ReplayConfig rc;
    rc.capacity = 8;
    ReplayBuffer buf(rc);
    for (int i = 0; i < 8; ++i) buf.push({{0.0}, 0, 0.0, {0.0}});
    buf.update_priorities(std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7}, std::vector<double>(8, 2.5));
    bool uniform = true;
    for (std::size_t i = 0; i < 8; ++i) uniform = uniform && buf.probability(i) == 0.125;
    Rng rng(13);
    buf.set_beta(1.0);
    for (int i = 0; i < 100; ++i)
      for (double w : buf.sample(8, rng).weights) uniform = uniform && w == 1.0;
    pass = pass && uniform;
    detail += std::string(", equal priorities ") + (uniform ? "uniform with unit weights" : "NOT uniform");
  }
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance gate"};
  int only = 0;
  std::string work_dir;
  app.add_option("--only", only, "Run a single criterion (1-9)")->check(CLI::Range(1, 9));
  app.add_option("--work-dir", work_dir, "Scratch directory for training outputs");
  CLI11_PARSE(app, argc, argv);
  g_work_dir = work_dir.empty() ? fs::temp_directory_path() / ("fhc_acceptance_" + std::to_string(::getpid()))
                                : fs::path(work_dir);
  fs::create_directories(g_work_dir);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"formula exactness", formula_exactness},
      {"reference dimensioning", reference_dimensioning},
      {"gradient correctness", gradient_correctness},
      {"DDQN sanity on the chain MDP", ddqn_sanity},
      {"oracle match at fixed load", oracle_match},
      {"utilization gain sweep", utilization_sweep},
      {"staircase convergence", staircase},
      {"reproducibility", reproducibility},
      {"Boltzmann and replay statistics", sampling_statistics},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<std::size_t>(only) != i + 1) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << "criterion " << i + 1 << " [" << criteria[i].first << "]: " << (o.pass ? "PASS" : "FAIL") << " - "
              << o.detail << std::endl;
  }
  if (work_dir.empty()) fs::remove_all(g_work_dir);
  return failures == 0 ? 0 : 1;
}
