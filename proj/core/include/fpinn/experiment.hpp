// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpinn/linalg.hpp"
#include "fpinn/network.hpp"
#include "fpinn/optim.hpp"
#include "fpinn/oracle.hpp"
#include "fpinn/quantum_models.hpp"

namespace fpinn {

enum class InitialState { kKet0, kKet00, kBell, kCustom };

std::string to_string(InitialState s);
InitialState initial_state_from_string(const std::string& s);

struct SystemConfig {
  std::string name = "spin_boson";  ///< "spin_boson" or "xxz"
  double j = 2.0;                   ///< XXZ only
  double delta = 0.5;               ///< XXZ only
  BathParams bath;
  InitialState rho0 = InitialState::kKet0;
  std::optional<ComplexMatrix> rho0_matrix;  ///< required iff rho0 == kCustom

  friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

struct GridConfig {
  int t_f = 201;
  double t_total = 6.0;

  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

/// One experiment: the system, its grid, both training phases and where the
/// run directory goes. Omitted blocks take documented defaults; the network
/// head sizes are derived from the system when not given.
struct ExperimentConfig {
  SystemConfig system;
  GridConfig grid;
  NetworkConfig network;
  TrainConfig train;
  NetworkConfig rho_network;
  TrainConfig rho_train;
  int oracle_substeps = 8;
  std::string output = "runs/default";

  SystemSpec system_spec() const;
  ComplexMatrix initial_state() const;
  TimeGrid time_grid() const;
  /// Cross-block checks (head sizes vs layouts, architecture per phase, ...).
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};


/// Parses and validates a config document after applying `overrides`
/// ("dotted.key=value", see apply_override). Errors are ValidationError with
/// "<source>:<line>: <json path>: <message>"; the line is omitted when the
/// offending key does not appear in the text.
ExperimentConfig parse_experiment_config(const std::string& text, const std::string& source = "<config>",
                                         const std::vector<std::string>& overrides = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        const std::vector<std::string>& overrides = {});

/// Full serialization with every default made explicit.
nlohmann::json to_json(const ExperimentConfig& c);
/// Parses an already-decoded document (no line information).
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

/// The same capacity in another architecture: with W the trunk width of a
/// forked or unified base (twice the subnetwork width of a separated one),
/// forked gets 3×W shared and 1×W/2 per branch, unified 4×W shared, and
/// separated 4×W/2 per subnetwork. Heads, dropout, norm and seed carry over.
NetworkConfig matched_network(const NetworkConfig& base, Architecture target);

/// Applies "dotted.path=value" to a config document. The value is read as
/// JSON when it parses, as a bare string otherwise. Intermediate objects are
/// created; whether the key is allowed is left to the parser.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace fpinn
