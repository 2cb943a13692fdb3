#include "fhc/fh_core.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

namespace fhc {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

void check_ordered_set(const std::vector<int>& values, const char* name) {
  if (values.empty()) throw std::invalid_argument(std::string(name) + " set is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] <= 0)
      throw std::invalid_argument(std::string(name) + " set must hold positive values");
    if (i > 0 && values[i] <= values[i - 1])
      throw std::invalid_argument(std::string(name) + " set must be strictly increasing");
  }
}

int position(std::span<const int> values, int v, const char* name) {
  auto it = std::lower_bound(values.begin(), values.end(), v);
  if (it == values.end() || *it != v)
    throw std::invalid_argument(std::string(name) + " value " + std::to_string(v) +
                                " is not in the configured set");
  return static_cast<int>(it - values.begin());
}

}  // namespace

void SystemConfig::validate() const {
  require(bandwidth_hz > 0, "bandwidth_hz must be positive");
  require(scs_index_mu >= 0 && scs_index_mu <= 4, "scs_index_mu must be in 0..4");
  require(n_prb_max > 0, "n_prb_max must be positive");
  require(n_re_per_prb_slot == 12 * 14, "n_re_per_prb_slot must equal 12 x 14 = 168");
  require(n_ant > 0, "n_ant must be positive");
  require(n_layers > 0, "n_layers must be positive");
  require(n_layers <= n_ant, "n_layers must not exceed n_ant");
  require(t_slot_s > 0, "t_slot_s must be positive");
  require(t_symb_s > 0, "t_symb_s must be positive");
  require(c_fh_bps > 0, "c_fh_bps must be positive");
  require(k_cells > 0, "k_cells must be positive");
}

std::string to_string(const CompressionConfig& cfg) {
  return "(q=" + std::to_string(cfg.q) + ", b_w=" + std::to_string(cfg.b_w) +
         ", r_w=" + std::to_string(cfg.r_w) + ")";
}

ConfigSets::ConfigSets() : ConfigSets({6, 8}, {16, 17, 18, 19, 20, 21, 22}, {1, 2, 4}) {}

ConfigSets::ConfigSets(std::vector<int> q_set, std::vector<int> b_set, std::vector<int> r_set)
    : q_(std::move(q_set)), b_(std::move(b_set)), r_(std::move(r_set)) {
  check_ordered_set(q_, "modulation");
  check_ordered_set(b_, "bitwidth");
  check_ordered_set(r_, "granularity");
}

bool ConfigSets::contains(const CompressionConfig& cfg) const {
  return std::binary_search(q_.begin(), q_.end(), cfg.q) &&
         std::binary_search(b_.begin(), b_.end(), cfg.b_w) &&
         std::binary_search(r_.begin(), r_.end(), cfg.r_w);
}

CompressionConfig ConfigSets::at(const CompressionIndex& idx) const {
  auto in = [](int i, const std::vector<int>& v) { return i >= 0 && i < static_cast<int>(v.size()); };
  if (!in(idx.q_idx, q_) || !in(idx.b_idx, b_) || !in(idx.r_idx, r_))
    throw std::out_of_range("compression index outside the configured sets");
  return {q_[idx.q_idx], b_[idx.b_idx], r_[idx.r_idx]};
}

CompressionIndex ConfigSets::index_of(const CompressionConfig& cfg) const {
  return {position(q_, cfg.q, "modulation"), position(b_, cfg.b_w, "bitwidth"),
          position(r_, cfg.r_w, "granularity")};
}

CompressionIndex ConfigSets::most_compressed() const {
  return {0, 0, static_cast<int>(r_.size()) - 1};
}

std::vector<CompressionConfig> ConfigSets::enumerate() const {
  std::vector<CompressionConfig> out;
  out.reserve(size());
  for (int q : q_)
    for (int b : b_)
      for (int r : r_) out.push_back({q, b, r});
  return out;
}

FronthaulModel::FronthaulModel(SystemConfig sys, ConfigSets sets)
    : sys_(sys), sets_(std::move(sets)) {
  sys_.validate();
}

void FronthaulModel::check_prb(int n_prb) const {
  if (n_prb < 0 || n_prb > sys_.n_prb_max)
    throw std::invalid_argument("n_prb " + std::to_string(n_prb) + " outside 0.." +
                                std::to_string(sys_.n_prb_max));
}

Bits FronthaulModel::payload_bits(int n_prb, int q) const {
  check_prb(n_prb);
  position(sets_.modulation(), q, "modulation");
  return Bits{sys_.n_re_per_prb_slot} * sys_.n_layers * n_prb * q;
}

Bits FronthaulModel::weight_bits(int n_prb, int r_w, int b_w) const {
  if (r_w <= 0) throw std::invalid_argument("precoder granularity must be positive");
  check_prb(n_prb);
  position(sets_.granularity(), r_w, "granularity");
  position(sets_.bitwidth(), b_w, "bitwidth");
  const Bits groups = (Bits{n_prb} + r_w - 1) / r_w;
  return groups * sys_.n_layers * sys_.n_ant * b_w;
}

Bits FronthaulModel::slot_bits(int n_prb, const CompressionConfig& cfg) const {
  return payload_bits(n_prb, cfg.q) + weight_bits(n_prb, cfg.r_w, cfg.b_w);
}

double FronthaulModel::fh_rate(int n_prb, const CompressionConfig& cfg) const {
  return static_cast<double>(slot_bits(n_prb, cfg)) / sys_.t_slot_s;
}

SlotRecord FronthaulModel::record(int t, int k, int n_prb, const CompressionConfig& cfg) const {
  SlotRecord rec;
  rec.t = t;
  rec.k = k;
  rec.n_prb = n_prb;
  rec.config = cfg;
  rec.payload_bits = payload_bits(n_prb, cfg.q);
  rec.weight_bits = weight_bits(n_prb, cfg.r_w, cfg.b_w);
  rec.rate_bps = static_cast<double>(rec.payload_bits + rec.weight_bits) / sys_.t_slot_s;
  rec.util = slot_utilization(rec.rate_bps, sys_.c_fh_bps);
  return rec;
}

double slot_utilization(double rate_bps, double c_fh_bps) {
  if (!(c_fh_bps > 0)) throw std::invalid_argument("fronthaul capacity must be positive");
  return rate_bps / c_fh_bps;
}

double average_utilization(std::span<const SlotRecord> records, int k_cells) {
  if (k_cells <= 0) throw std::invalid_argument("k_cells must be positive");
  std::map<int, std::vector<int>> cells_per_slot;
  std::map<int, double> sum_per_slot;
  for (const auto& rec : records) {
    if (rec.k < 0 || rec.k >= k_cells)
      throw std::invalid_argument("slot record cell index out of range");
    cells_per_slot[rec.t].push_back(rec.k);
    sum_per_slot[rec.t] += rec.util;
  }
  if (cells_per_slot.empty()) throw std::invalid_argument("no slot records");
  for (auto& [t, cells] : cells_per_slot) {
    std::sort(cells.begin(), cells.end());
    bool complete = static_cast<int>(cells.size()) == k_cells;
    for (int k = 0; complete && k < k_cells; ++k) complete = cells[k] == k;
    if (!complete)
      throw std::invalid_argument("slot " + std::to_string(t) + " does not cover every cell exactly once");
  }
  double total = 0.0;
  for (const auto& [t, s] : sum_per_slot) total += s;
  return total / static_cast<double>(sum_per_slot.size());
}

std::uint64_t action_space_cardinality(std::size_t q_count, std::size_t b_count,
                                       std::size_t r_count, int k_cells) {
  if (q_count == 0 || b_count == 0 || r_count == 0)
    throw std::invalid_argument("configuration sets must be non-empty");
  if (k_cells < 0) throw std::invalid_argument("k_cells must be non-negative");
  const std::uint64_t base = std::uint64_t{q_count} * b_count * r_count;
  std::uint64_t out = 1;
  for (int i = 0; i < k_cells; ++i) {
    if (out > std::numeric_limits<std::uint64_t>::max() / base)
      throw std::overflow_error("action space cardinality overflows 64 bits");
    out *= base;
  }
  return out;
}

}  // namespace fhc
