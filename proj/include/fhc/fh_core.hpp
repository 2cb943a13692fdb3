#pragma once

// Fronthaul load model: payload and precoder-weight bit counts per slot and
// cell, the resulting link rate and utilization, and the configuration space
// of the three compression knobs.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fhc {

using Bits = std::int64_t;

struct SystemConfig {
  double bandwidth_hz = 100e6;
  int scs_index_mu = 1;
  int n_prb_max = 273;
  int n_re_per_prb_slot = 168;  // 12 subcarriers x 14 symbols
  int n_ant = 64;
  int n_layers = 12;
  double t_slot_s = 5e-4;
  double t_symb_s = 33.33e-6;
  double c_fh_bps = 25e9;
  int k_cells = 3;

  /// Throws std::invalid_argument on the first violated invariant.
  void validate() const;
};

/// One cell's compression setting: modulation cap q (bit/symbol), precoder
/// weight bitwidth b_w and precoder granularity r_w (PRBs sharing a weight).
struct CompressionConfig {
  int q = 6;
  int b_w = 16;
  int r_w = 4;

  auto operator<=>(const CompressionConfig&) const = default;
};

std::string to_string(const CompressionConfig& cfg);

/// Position of a CompressionConfig inside the ordered sets.
struct CompressionIndex {
  int q_idx = 0;
  int b_idx = 0;
  int r_idx = 0;

  auto operator<=>(const CompressionIndex&) const = default;
};

/// The ordered value sets Q, B^w and R^w. Each set is non-empty and strictly
/// increasing; navigation is index based.
class ConfigSets {
 public:
  /// Q = {6, 8}, B^w = {16..22}, R^w = {1, 2, 4}.
  ConfigSets();
  ConfigSets(std::vector<int> q_set, std::vector<int> b_set, std::vector<int> r_set);

  std::span<const int> modulation() const { return q_; }
  std::span<const int> bitwidth() const { return b_; }
  std::span<const int> granularity() const { return r_; }

  bool contains(const CompressionConfig& cfg) const;
  CompressionConfig at(const CompressionIndex& idx) const;
  CompressionIndex index_of(const CompressionConfig& cfg) const;

  /// Most compressed corner: smallest q, smallest b_w, largest r_w.
  CompressionIndex most_compressed() const;

  /// Every configuration, q outermost then b_w then r_w, ascending.
  std::vector<CompressionConfig> enumerate() const;
  std::size_t size() const { return q_.size() * b_.size() * r_.size(); }

 private:
  std::vector<int> q_;
  std::vector<int> b_;
  std::vector<int> r_;
};

/// Per-slot, per-cell fronthaul record.
struct SlotRecord {
  int t = 0;
  int k = 0;
  int n_prb = 0;
  CompressionConfig config;
  Bits payload_bits = 0;
  Bits weight_bits = 0;
  double rate_bps = 0.0;
  double util = 0.0;
  double latency_s = 0.0;
};

/// Bit and rate model of the shared fronthaul for a fixed system and
/// compression set. All bit counts are exact integers.
class FronthaulModel {
 public:
  FronthaulModel(SystemConfig sys, ConfigSets sets);

  const SystemConfig& system() const { return sys_; }
  const ConfigSets& sets() const { return sets_; }

  /// N_RE * layers * n_prb * q.
  Bits payload_bits(int n_prb, int q) const;
  /// ceil(n_prb / r_w) * layers * antennas * b_w.
  Bits weight_bits(int n_prb, int r_w, int b_w) const;
  Bits slot_bits(int n_prb, const CompressionConfig& cfg) const;
  double fh_rate(int n_prb, const CompressionConfig& cfg) const;

  /// Fills every field of a SlotRecord except latency_s.
  SlotRecord record(int t, int k, int n_prb, const CompressionConfig& cfg) const;

 private:
  void check_prb(int n_prb) const;

  SystemConfig sys_;
  ConfigSets sets_;
};

double slot_utilization(double rate_bps, double c_fh_bps);

/// Mean over slots of the per-slot sum over cells (not divided by K).
/// Records must form a complete T x K grid with cell indices 0..k_cells-1.
double average_utilization(std::span<const SlotRecord> records, int k_cells);

/// (|Q| * |B^w| * |R^w|)^K; throws std::overflow_error past 2^64.
std::uint64_t action_space_cardinality(std::size_t q_count, std::size_t b_count,
                                       std::size_t r_count, int k_cells);

}  // namespace fhc
