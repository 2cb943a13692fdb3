#pragma once

// The train / eval / sweep / oracle commands behind the fhc tool. Each writes
// its outputs into an output directory; every CSV starts with a
// "# schema: <name>" comment line.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fhc/agent.hpp"
#include "fhc/config.hpp"
#include "fhc/evaluation.hpp"

namespace fhc {

inline constexpr const char* kTrainLogSchema = "fhc.train_log.v1";
inline constexpr const char* kEvalLogSchema = "fhc.eval_log.v1";
inline constexpr const char* kKpiSchema = "fhc.kpi.v1";
inline constexpr const char* kConfigHistogramSchema = "fhc.config_histogram.v1";
inline constexpr const char* kSummarySchema = "fhc.eval_summary.v1";
inline constexpr const char* kSweepSchema = "fhc.sweep.v1";
inline constexpr const char* kOracleSchema = "fhc.oracle.v1";

/// Writes manifest.ini, train_log.csv, checkpoint.json (plus
/// checkpoints/step_<n>.json every checkpoint_every steps and eval_log.csv
/// when train.eval_every is set). Progress lines go to `progress` if given.
TrainResult run_train(const RunConfig& cfg, const std::filesystem::path& out_dir,
                      const std::vector<std::string>& overrides = {}, std::ostream* progress = nullptr);

/// Greedy policy of the network selected by eval.network.
Policy trained_policy(const RunConfig& cfg, const TrainResult& trained);

/// Evaluates a checkpoint, or the reference configuration held fixed when
/// no checkpoint is given. Writes kpi.csv, config_histogram.csv and
/// summary.json.
EvalReport run_eval(const RunConfig& cfg, const std::optional<std::filesystem::path>& checkpoint,
                    const std::filesystem::path& out_dir);

EvalReport evaluate_reference(const RunConfig& cfg);

struct SweepRow {
  double mean_prb = 0.0;
  double util_drlfc = 0.0;
  double util_ref = 0.0;
  double gain_percent = 0.0;
  double violation_freq_drlfc = 0.0;
};

/// Trains one agent per load in sweep.mean_prb, evaluates it against the
/// reference, and writes sweep.csv plus one sub-directory per load.
std::vector<SweepRow> run_sweep(const RunConfig& cfg, const std::filesystem::path& out_dir,
                                std::ostream* progress = nullptr);

/// Best symmetric static configuration per load in sweep.mean_prb, in
/// capacity and latency mode; written to `out` as CSV.
void run_oracle(const RunConfig& cfg, std::ostream& out);

void write_kpi_csv(const std::filesystem::path& path, const EvalReport& report, const ConfigSets& sets);
void write_config_histogram_csv(const std::filesystem::path& path, const EvalReport& report,
                                const ConfigSets& sets);
void write_summary_json(const std::filesystem::path& path, const EvalReport& report, const ConfigSets& sets);

}  // namespace fhc
