// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fpinn/experiment.hpp"

namespace fpinn::cli {

/// Flags shared by the experiment subcommands.
struct CommonOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  bool deterministic = false;
  /// The command line as typed, stored in the run manifest.
  std::string invocation;
};

/// Loads the config, applies --override, --seed (all four seeds), --out and
/// --deterministic, then validates.
ExperimentConfig resolve_config(const CommonOptions& opts);

int cmd_oracle(const CommonOptions& opts, std::ostream& log);
int cmd_train_operators(const CommonOptions& opts, std::ostream& log);

/// `priors` is "oracle" or the path of an operator checkpoint.
int cmd_train_rho(const CommonOptions& opts, const std::string& priors, std::ostream& log);

int cmd_compare_architectures(const CommonOptions& opts, const std::vector<std::string>& architectures,
                              const std::vector<std::uint64_t>& seeds, std::ostream& log);

/// Re-evaluates a checkpoint against a fresh oracle run of the config.
/// `priors` is only used for ρ checkpoints.
int cmd_evaluate(const CommonOptions& opts, const std::filesystem::path& checkpoint,
                 const std::string& priors, std::ostream& log);

struct PlotInput {
  std::filesystem::path file;
  std::string label;  ///< defaults to the file stem
};

int cmd_plot(const std::vector<PlotInput>& inputs, const std::vector<std::string>& columns,
             const std::filesystem::path& output, const std::string& title, std::ostream& log);

/// Maps an exception escaping a command to the process exit code:
/// 1 for validation errors, 2 for numerical failures.
int exit_code_for(const std::exception& e);

}  // namespace fpinn::cli
