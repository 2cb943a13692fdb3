#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "fhc/qnet.hpp"

namespace fhc {

inline constexpr std::string_view kCheckpointFormat = "fhc.checkpoint.v1";

/// Online and target parameters with the architecture and seeds that produced
/// them. Stored as JSON; doubles are written in shortest round-trip form, so a
/// save/load cycle is bit exact.
struct Checkpoint {
  MlpSpec spec;
  std::uint64_t run_seed = 0;
  std::uint64_t train_seed = 0;
  std::size_t step = 0;
  Mlp online;
  Mlp target;
};

std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(std::string_view text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace fhc
