// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "fpinn/network.hpp"
#include "fpinn/trainer.hpp"

namespace fpinn {

/// On-disk layout (all integers little-endian):
///   8 bytes  magic "FPINNCKP"
///   u32      format version
///   u64      header length H
///   H bytes  JSON header {"network", "groups": [{"name", "count"}], "meta"}
///   f64[]    every group's values in header order, little-endian
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  NetworkConfig config;
  ParamStore params;
  nlohmann::json meta = nlohmann::json::object();
};

void save_checkpoint(const std::filesystem::path& path, const NetworkConfig& config,
                     const ParamStore& params, const nlohmann::json& meta);

/// Throws ValidationError for a missing file, wrong magic, unknown version or
/// truncated payload.
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Rebuilds the network from the stored config and installs the stored
/// parameters; the group layout must match what the config builds.
Model model_from_checkpoint(const Checkpoint& ckpt);

}  // namespace fpinn
