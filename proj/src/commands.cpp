#include "fhc/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

#include "json.hpp"

#include "fhc/checkpoint.hpp"
#include "fhc/oracle.hpp"

namespace fhc {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string config_columns(int k_cells) {
  std::string s;
  for (int k = 0; k < k_cells; ++k) {
    const std::string c = std::to_string(k);
    s += ",q_" + c + ",b_w_" + c + ",r_w_" + c;
  }
  return s;
}

std::string config_values(const std::vector<CompressionConfig>& configs) {
  std::string s;
  for (const auto& c : configs)
    s += "," + std::to_string(c.q) + "," + std::to_string(c.b_w) + "," + std::to_string(c.r_w);
  return s;
}

const Mlp& eval_network(const RunConfig& cfg, const Mlp& online, const Mlp& target) {
  return cfg.eval.network == EvalNetwork::target ? target : online;
}

EvalOptions eval_options(const RunConfig& cfg) {
  EvalOptions opts;
  opts.episodes = cfg.eval.episodes;
  opts.steady_window = cfg.eval.steady_window;
  return opts;
}

void write_report(const fs::path& out_dir, const EvalReport& report, const ConfigSets& sets) {
  write_kpi_csv(out_dir / "kpi.csv", report, sets);
  write_config_histogram_csv(out_dir / "config_histogram.csv", report, sets);
  write_summary_json(out_dir / "summary.json", report, sets);
}

}  // namespace

TrainResult run_train(const RunConfig& cfg, const fs::path& out_dir, const std::vector<std::string>& overrides,
                      std::ostream* progress) {
  fs::create_directories(out_dir);
  {
    const fs::path path = out_dir / "manifest.ini";
    std::ofstream m = open_output(path);
    m << manifest_text(cfg, overrides);
    finish(m, path);
  }

  const fs::path log_path = out_dir / "train_log.csv";
  std::ofstream log = open_output(log_path);
  log << "# schema: " << kTrainLogSchema << "\n"
      << "step,action,reward,loss,temperature,beta_per,cell_sum_util,max_latency_us,violation"
      << config_columns(cfg.env.system.k_cells) << "\n";

  std::ofstream eval_log;
  const EnvConfig eval_env = evaluation_env(cfg);
  if (cfg.train.eval_every > 0) {
    eval_log = open_output(out_dir / "eval_log.csv");
    eval_log << "# schema: " << kEvalLogSchema << "\n"
             << "step,mean_cell_sum_util,steady_state_util,violation_frequency\n";
  }

  if (cfg.checkpoint_every > 0) fs::create_directories(out_dir / "checkpoints");
  FronthaulTask task(cfg.env);
  const auto observer = [&](const TrainLogRow& row, const Mlp& online, const Mlp& target) {
    const StepInfo& info = task.env().last_info();
    log << row.step << ',' << row.action << ',' << num(row.reward) << ',' << num(row.loss) << ','
        << num(row.temperature) << ',' << num(row.beta) << ',' << num(info.mean_cell_sum_util) << ','
        << num(info.max_latency_s * 1e6) << ',' << (info.constraint_indicator == 0 ? 1 : 0)
        << config_values(info.configs) << '\n';
    const std::size_t done = row.step + 1;
    if (cfg.checkpoint_every > 0 && done % cfg.checkpoint_every == 0)
      save_checkpoint(out_dir / "checkpoints" / ("step_" + std::to_string(done) + ".json"),
                      {cfg.net, cfg.seed, cfg.train.seed, done, online, target});
    if (cfg.train.eval_every > 0 && done % cfg.train.eval_every == 0) {
      EvalOptions opts = eval_options(cfg);
      opts.episodes = 1;
      const EvalSummary s = evaluate(eval_env, greedy_policy(eval_network(cfg, online, target)), opts).summary;
      eval_log << done << ',' << num(s.mean_cell_sum_util) << ',' << num(s.steady_state_util) << ','
               << num(s.violation_frequency) << '\n';
    }
    if (progress && cfg.train.total_steps >= 10 && done % (cfg.train.total_steps / 10) == 0)
      *progress << "step " << done << "/" << cfg.train.total_steps << " reward " << row.reward
                << " temperature " << row.temperature << "\n";
  };
  TrainResult result = train(task, cfg.net, cfg.train, observer);
  finish(log, log_path);
  save_checkpoint(out_dir / "checkpoint.json",
                  {cfg.net, cfg.seed, cfg.train.seed, cfg.train.total_steps, result.online, result.target});
  return result;
}

Policy trained_policy(const RunConfig& cfg, const TrainResult& trained) {
  return greedy_policy(eval_network(cfg, trained.online, trained.target));
}

EvalReport evaluate_reference(const RunConfig& cfg) {
  EvalOptions opts = eval_options(cfg);
  opts.start = reference_policy(cfg.env.system, cfg.env.sets);
  return evaluate(evaluation_env(cfg), static_policy(), opts);
}

EvalReport run_eval(const RunConfig& cfg, const std::optional<fs::path>& checkpoint, const fs::path& out_dir) {
  EvalReport report;
  if (checkpoint) {
    const Checkpoint ckpt = load_checkpoint(*checkpoint);
    MlpSpec expected = cfg.net;
    expected.init_seed = ckpt.spec.init_seed;
    if (!(ckpt.spec == expected))
      throw ConfigError("checkpoint " + checkpoint->string() + " does not match the configured network");
    report = evaluate(evaluation_env(cfg), greedy_policy(eval_network(cfg, ckpt.online, ckpt.target)),
                      eval_options(cfg));
  } else {
    report = evaluate_reference(cfg);
  }
  write_report(out_dir, report, cfg.env.sets);
  return report;
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg, const fs::path& out_dir, std::ostream* progress) {
  fs::create_directories(out_dir);
  const fs::path path = out_dir / "sweep.csv";
  std::ofstream out = open_output(path);
  out << "# schema: " << kSweepSchema << "\n"
      << "mean_prb,util_drlfc,util_ref,gain_percent,violation_freq_drlfc\n";
  std::vector<SweepRow> rows;
  if (cfg.eval.episodes > 0) {
    for (double mean : cfg.sweep_mean_prb) {
      RunConfig load = cfg;
      load.env.traffic.mean_prb = mean;
      const fs::path dir = out_dir / ("load_" + num(mean));
      if (progress) *progress << "training at mean_prb " << mean << "\n";
      const TrainResult trained = run_train(load, dir, {"traffic.mean_prb=" + num(mean)});
      const EvalReport drl = evaluate(evaluation_env(load), trained_policy(load, trained), eval_options(load));
      write_report(dir, drl, load.env.sets);
      const EvalReport ref = evaluate_reference(load);
      SweepRow row;
      row.mean_prb = mean;
      row.util_drlfc = drl.summary.mean_cell_sum_util;
      row.util_ref = ref.summary.mean_cell_sum_util;
      row.gain_percent = (row.util_drlfc - row.util_ref) / row.util_ref * 100.0;
      row.violation_freq_drlfc = drl.summary.violation_frequency;
      out << num(row.mean_prb) << ',' << num(row.util_drlfc) << ',' << num(row.util_ref) << ','
          << num(row.gain_percent) << ',' << num(row.violation_freq_drlfc) << '\n';
      if (progress)
        *progress << "mean_prb " << mean << ": drl " << row.util_drlfc << " ref " << row.util_ref << " gain "
                  << row.gain_percent << "%\n";
      rows.push_back(row);
    }
  }
  finish(out, path);
  return rows;
}

void run_oracle(const RunConfig& cfg, std::ostream& out) {
  const FronthaulModel model(cfg.env.system, cfg.env.sets);
  out << "# schema: " << kOracleSchema << "\n"
      << "mean_prb,n_prb,mode,q,b_w,r_w,aggregate_rate_bps,cell_sum_util\n";
  for (double mean : cfg.sweep_mean_prb) {
    const int n_prb = std::clamp(static_cast<int>(std::lround(mean)), 1, cfg.env.system.n_prb_max);
    for (const auto mode : {FeasibilityMode::capacity, FeasibilityMode::latency}) {
      out << num(mean) << ',' << n_prb << ',' << (mode == FeasibilityMode::capacity ? "capacity" : "latency");
      try {
        const StaticChoice c = best_static_config(model, n_prb, cfg.env.latency, cfg.env.reward.tau_max_s, mode);
        out << ',' << c.config.q << ',' << c.config.b_w << ',' << c.config.r_w << ',' << num(c.aggregate_rate_bps)
            << ',' << num(c.cell_sum_util) << '\n';
      } catch (const std::runtime_error&) {
        out << ",,,,,\n";
      }
    }
  }
}

void write_kpi_csv(const fs::path& path, const EvalReport& report, const ConfigSets&) {
  std::ofstream out = open_output(path);
  const std::size_t k = report.steps.empty() ? 0 : report.steps.front().info.configs.size();
  out << "# schema: " << kKpiSchema << "\n"
      << "episode,step,action,reward,cell_sum_util,max_latency_us,violating_slots,slots,delivered_payload_bits"
      << config_columns(static_cast<int>(k)) << "\n";
  for (const auto& s : report.steps)
    out << s.episode << ',' << s.step << ',' << to_string(s.action) << ',' << num(s.reward) << ','
        << num(s.info.mean_cell_sum_util) << ',' << num(s.info.max_latency_s * 1e6) << ','
        << s.info.violating_slots << ',' << s.info.slots << ',' << s.info.delivered_payload_bits
        << config_values(s.info.configs) << '\n';
  finish(out, path);
}

void write_config_histogram_csv(const fs::path& path, const EvalReport& report, const ConfigSets& sets) {
  std::ofstream out = open_output(path);
  out << "# schema: " << kConfigHistogramSchema << "\n"
      << "episode,step,parameter,value,cells\n";
  for (const auto& s : report.steps) {
    auto emit = [&](const char* name, std::span<const int> values, int CompressionConfig::*field) {
      for (int v : values) {
        int cells = 0;
        for (const auto& c : s.info.configs) cells += c.*field == v ? 1 : 0;
        out << s.episode << ',' << s.step << ',' << name << ',' << v << ',' << cells << '\n';
      }
    };
    emit("q", sets.modulation(), &CompressionConfig::q);
    emit("b_w", sets.bitwidth(), &CompressionConfig::b_w);
    emit("r_w", sets.granularity(), &CompressionConfig::r_w);
  }
  finish(out, path);
}

void write_summary_json(const fs::path& path, const EvalReport& report, const ConfigSets& sets) {
  const EvalSummary& s = report.summary;
  nlohmann::ordered_json j;
  j["schema"] = kSummarySchema;
  j["episodes"] = s.episodes;
  j["decision_steps"] = s.decision_steps;
  j["slots"] = s.slots;
  j["mean_cell_sum_util"] = s.mean_cell_sum_util;
  j["steady_state_util"] = s.steady_state_util;
  j["violation_frequency"] = s.violation_frequency;
  j["interval_violation_frequency"] = s.interval_violation_frequency;
  j["mean_throughput_bps"] = s.mean_throughput_bps;
  j["mean_reward"] = s.mean_reward;

  // Cells per parameter value at the last step of every episode.
  std::map<int, int> q, b, r;
  for (int v : sets.modulation()) q[v] = 0;
  for (int v : sets.bitwidth()) b[v] = 0;
  for (int v : sets.granularity()) r[v] = 0;
  for (std::size_t i = 0; i < report.steps.size(); ++i) {
    if (i + 1 < report.steps.size() && report.steps[i + 1].episode == report.steps[i].episode) continue;
    for (const auto& c : report.steps[i].info.configs) {
      ++q[c.q];
      ++b[c.b_w];
      ++r[c.r_w];
    }
  }
  auto to_json = [](const std::map<int, int>& m) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (const auto& [v, n] : m) o[std::to_string(v)] = n;
    return o;
  };
  j["final_config_histogram"] = {{"q", to_json(q)}, {"b_w", to_json(b)}, {"r_w", to_json(r)}};

  std::ofstream out = open_output(path);
  out << j.dump(2) << "\n";
  finish(out, path);
}

}  // namespace fhc
