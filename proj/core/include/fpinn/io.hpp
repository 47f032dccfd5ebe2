// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fpinn/oracle.hpp"
#include "fpinn/quantum_models.hpp"
#include "fpinn/trainer.hpp"

namespace fpinn {

/// A CSV file: optional '#' comment lines, a header row, numeric rows.
struct CsvTable {
  std::vector<std::string> comments;  ///< without the leading "# "
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of `name`; throws ValidationError listing the available columns.
  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

/// Deterministic text form; numbers use the shortest round-trip repr.
std::string format_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text, const std::string& source = "<csv>");
CsvTable read_csv(const std::filesystem::path& path);

/// `t` plus the layout's feature columns (re_O12, im_O12, ...).
CsvTable operator_table(const Trajectory& traj, const FeatureLayout& layout, const std::string& symbol);
/// `t` plus the density layout's feature columns.
CsvTable density_table(const Trajectory& rho, const DensityLayout& layout);
/// Derived scalars: sigma_z and coherence for two-level systems, coherence and
/// concurrence for two qubits, and fidelity_vs_ref when `ref` is given.
CsvTable observables_table(const Trajectory& rho, const SystemSpec& spec, const Trajectory* ref = nullptr);
/// epoch, lr, l_tot, then l_mod/l_ini/l_er per head ("o", "q" or "rho").
CsvTable loss_table(const RunRecord& record);

/// Writes a new file; refuses to overwrite an existing one.
void write_new_file(const std::filesystem::path& path, std::string_view content);

/// 64-bit FNV-1a, used to pin fixture contents.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

}  // namespace fpinn
