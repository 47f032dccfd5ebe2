// SPDX-License-Identifier: Apache-2.0
#include "fpinn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fpinn/error.hpp"
#include "fpinn/serialize.hpp"

namespace fpinn {

using namespace json_util;

namespace {

constexpr int kDefaultWidth = 256;
constexpr int kDefaultBranchWidth = 128;

NetworkConfig default_network(Architecture a, std::vector<int> outs) {
  switch (a) {
    case Architecture::kForked:
      return NetworkConfig::forked(kDefaultWidth, kDefaultBranchWidth, std::move(outs));
    case Architecture::kUnified:
      return NetworkConfig::unified(kDefaultWidth, std::move(outs));
    case Architecture::kSeparated:
      return NetworkConfig::separated(kDefaultBranchWidth, std::move(outs));
    case Architecture::kPlain:
      return NetworkConfig::plain(kDefaultWidth, outs.empty() ? 1 : outs.front());
  }
  throw ValidationError("unknown architecture");
}

/// Architecture defaults first, then the block's explicit keys on top.
NetworkConfig parse_network(const Json* block, const std::string& path, Architecture fallback,
                            const std::vector<int>& heads) {
  Architecture arch = fallback;
  if (block && block->is_object() && block->contains("architecture")) {
    try {
      arch = architecture_from_string(get_string(block->at("architecture"), path + ".architecture"));
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      throw ValidationError(what.rfind(path, 0) == 0 ? what : path + ".architecture: " + what);
    }
  }
  NetworkConfig base = default_network(arch, heads);
  return block ? network_config_from_json(*block, path, std::move(base)) : base;
}

/// Default weights: 0.1 for XXZ; 0.01 for the spin-boson model except 0.001
/// in the γ >= 1 regime.
double default_lambda_er(const SystemConfig& s) {
  if (s.name == "xxz") return 0.1;
  return s.bath.gamma >= 1.0 ? 0.001 : 0.01;
}

ComplexMatrix parse_matrix(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ValidationError(path + ": expected a square array of [re, im] pairs");
  const int n = static_cast<int>(j.size());
  if (n > 4) throw ValidationError(path + ": at most 4x4 supported");
  ComplexMatrix m(n);
  for (int r = 0; r < n; ++r) {
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != n) {
      throw ValidationError(row_path + ": expected " + std::to_string(n) + " entries");
    }
    for (int c = 0; c < n; ++c) {
      const std::string p = row_path + "[" + std::to_string(c) + "]";
      const Json& e = j[r][c];
      if (e.is_number()) {
        m(r, c) = get_number(e, p);
      } else if (e.is_array() && e.size() == 2) {
        m(r, c) = Complex(get_number(e[0], p + "[0]"), get_number(e[1], p + "[1]"));
      } else {
        throw ValidationError(p + ": expected a number or [re, im]");
      }
    }
  }
  return m;
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.dim(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.dim(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

SystemConfig parse_system(const Json* block) {
  SystemConfig s;
  if (!block) return s;
  const Json& j = *block;
  require_keys(j, "system", {"name", "J", "delta", "Gamma", "gamma", "T", "rho0", "rho0_matrix"});
  if (j.contains("name")) {
    s.name = get_string(j["name"], "system.name");
    if (s.name != "spin_boson" && s.name != "xxz") {
      throw ValidationError("system.name: unknown system '" + s.name + "' (expected spin_boson or xxz)");
    }
  }
  // The two systems ship with different initial-state defaults.
  s.rho0 = s.name == "xxz" ? InitialState::kKet00 : InitialState::kKet0;
  if (j.contains("J")) s.j = get_number(j["J"], "system.J");
  if (j.contains("delta")) s.delta = get_number(j["delta"], "system.delta");
  if (j.contains("Gamma")) s.bath.coupling = get_number(j["Gamma"], "system.Gamma");
  if (j.contains("gamma")) s.bath.gamma = get_number(j["gamma"], "system.gamma");
  if (j.contains("T")) s.bath.temperature = get_number(j["T"], "system.T");
  if (j.contains("rho0")) {
    try {
      s.rho0 = initial_state_from_string(get_string(j["rho0"], "system.rho0"));
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      throw ValidationError(what.rfind("system.rho0", 0) == 0 ? what : "system.rho0: " + what);
    }
  }
  if (j.contains("rho0_matrix")) s.rho0_matrix = parse_matrix(j["rho0_matrix"], "system.rho0_matrix");
  return s;
}

/// 1-based line of the first quoted occurrence of `key`, or 0.
int line_of_key(const std::string& text, const std::string& key) {
  const std::size_t pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

/// Best-effort line for a "a.b[2].c: message" error: the last plain key of
/// the path, searched in the raw text.
int line_for_error(const std::string& text, const std::string& message) {
  const std::size_t colon = message.find(": ");
  std::string path = colon == std::string::npos ? message : message.substr(0, colon);
  const std::size_t bracket = path.find('[');
  if (bracket != std::string::npos) path = path.substr(0, bracket);
  const std::size_t dot = path.rfind('.');
  const std::string key = dot == std::string::npos ? path : path.substr(dot + 1);
  return key.empty() ? 0 : line_of_key(text, key);
}

}  // namespace

std::string to_string(InitialState s) {
  switch (s) {
    case InitialState::kKet0: return "ket0";
    case InitialState::kKet00: return "ket00";
    case InitialState::kBell: return "bell";
    case InitialState::kCustom: return "custom";
  }
  return "unknown";
}

InitialState initial_state_from_string(const std::string& s) {
  if (s == "ket0") return InitialState::kKet0;
  if (s == "ket00") return InitialState::kKet00;
  if (s == "bell") return InitialState::kBell;
  if (s == "custom") return InitialState::kCustom;
  throw ValidationError("unknown initial state '" + s + "' (expected ket0, ket00, bell or custom)");
}

SystemSpec ExperimentConfig::system_spec() const {
  if (system.name == "xxz") return xxz_spec(system.j, system.delta, system.bath);
  return spin_boson_spec(system.bath);
}

ComplexMatrix ExperimentConfig::initial_state() const {
  switch (system.rho0) {
    case InitialState::kKet0: return ket0_state();
    case InitialState::kKet00: return ket00_state();
    case InitialState::kBell: return bell_state();
    case InitialState::kCustom: return *system.rho0_matrix;
  }
  throw ValidationError("unknown initial state");
}

TimeGrid ExperimentConfig::time_grid() const { return TimeGrid(grid.t_f, grid.t_total); }

void ExperimentConfig::validate() const {
  system.bath.validate();
  const SystemSpec spec = system_spec();
  if (grid.t_f < 1) throw ValidationError("grid.t_f: must be >= 1");
  if (!(grid.t_total > 0.0)) throw ValidationError("grid.T_tot: must be > 0");
  if (oracle_substeps < 1) throw ValidationError("oracle.substeps: must be >= 1");
  if (system.rho0 == InitialState::kCustom && !system.rho0_matrix) {
    throw ValidationError("system.rho0_matrix: required when rho0 is 'custom'");
  }
  if (system.rho0 != InitialState::kCustom && system.rho0_matrix) {
    throw ValidationError("system.rho0_matrix: only allowed when rho0 is 'custom'");
  }
  const ComplexMatrix rho0 = initial_state();
  if (rho0.dim() != spec.dim) {
    throw ValidationError("system.rho0: a " + std::to_string(rho0.dim()) + "-level state does not fit " +
                          system.name);
  }
  if (system.rho0_matrix) {
    if (!is_hermitian(rho0)) throw ValidationError("system.rho0_matrix: not Hermitian");
    if (std::abs(rho0.trace() - 1.0) > 1e-10) throw ValidationError("system.rho0_matrix: trace must be 1");
    if (hermitian_eigendecompose((rho0 + rho0.adjoint()) * 0.5).eigenvalues.back() < -1e-10) {
      throw ValidationError("system.rho0_matrix: not positive semidefinite");
    }
  }
  const auto wrap = [](const std::string& path, const auto& fn) {
    try {
      fn();
    } catch (const ValidationError& e) {
      throw ValidationError(path + ": " + e.what());
    }
  };
  wrap("network", [&] { network.validate(); });
  wrap("rho_network", [&] { rho_network.validate(); });
  wrap("train", [&] { train.validate(); });
  wrap("rho_train", [&] { rho_train.validate(); });
  if (network.architecture == Architecture::kPlain) {
    throw ValidationError("network.architecture: the operator network needs two heads (not plain)");
  }
  const std::vector<int> heads = {spec.o_layout.n_features(), spec.q_layout.n_features()};
  if (network.out_features != heads) {
    throw ValidationError("network.out_features: must be [" + std::to_string(heads[0]) + ", " +
                          std::to_string(heads[1]) + "] for " + system.name);
  }
  if (rho_network.architecture != Architecture::kPlain) {
    throw ValidationError("rho_network.architecture: must be plain");
  }
  if (rho_network.out_features != std::vector<int>{spec.rho_layout.n_features()}) {
    throw ValidationError("rho_network.out_features: must be [" +
                          std::to_string(spec.rho_layout.n_features()) + "] for " + system.name);
  }
  if (output.empty()) throw ValidationError("output: must not be empty");
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  require_keys(j, "config",
               {"system", "grid", "network", "train", "rho_network", "rho_train", "oracle", "output"});
  const auto block = [&](const char* key) -> const Json* {
    if (!j.contains(key)) return nullptr;
    require_object(j[key], key);
    return &j[key];
  };

  ExperimentConfig c;
  c.system = parse_system(block("system"));
  if (const Json* g = block("grid")) {
    require_keys(*g, "grid", {"t_f", "T_tot"});
    if (g->contains("t_f")) c.grid.t_f = static_cast<int>(get_integer(g->at("t_f"), "grid.t_f"));
    if (g->contains("T_tot")) c.grid.t_total = get_number(g->at("T_tot"), "grid.T_tot");
  }
  if (const Json* o = block("oracle")) {
    require_keys(*o, "oracle", {"substeps"});
    if (o->contains("substeps")) {
      c.oracle_substeps = static_cast<int>(get_integer(o->at("substeps"), "oracle.substeps"));
    }
  }
  if (j.contains("output")) c.output = get_string(j["output"], "output");

  // Head sizes depend on the system; a bad system surfaces in validate().
  std::vector<int> heads;
  int rho_features = 3;
  try {
    const SystemSpec spec = c.system_spec();
    heads = {spec.o_layout.n_features(), spec.q_layout.n_features()};
    rho_features = spec.rho_layout.n_features();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("system: ") + e.what());
  }
  c.network = parse_network(block("network"), "network", Architecture::kForked, heads);
  c.rho_network = parse_network(block("rho_network"), "rho_network", Architecture::kPlain, {rho_features});

  TrainConfig train_base;
  train_base.lambda_er = default_lambda_er(c.system);
  c.train = block("train") ? train_config_from_json(*block("train"), "train", train_base) : train_base;
  // The ρ phase reuses the operator-phase settings unless told otherwise.
  c.rho_train = block("rho_train") ? train_config_from_json(*block("rho_train"), "rho_train", c.train)
                                   : c.train;
  c.validate();
  return c;
}

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& source,
                                         const std::vector<std::string>& overrides) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw ValidationError(source + ":" + std::to_string(line) + ": invalid JSON: " + e.what());
  }
  for (const auto& o : overrides) apply_override(doc, o);
  try {
    return experiment_config_from_json(doc);
  } catch (const ValidationError& e) {
    const int line = line_for_error(text, e.what());
    throw ValidationError(source + ":" + (line > 0 ? std::to_string(line) + ":" : std::string()) + " " +
                          e.what());
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        const std::vector<std::string>& overrides) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open config: " + path.string());
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_experiment_config(buf.str(), path.string(), overrides);
}

Json to_json(const ExperimentConfig& c) {
  Json system = {{"name", c.system.name},
                 {"J", c.system.j},
                 {"delta", c.system.delta},
                 {"Gamma", c.system.bath.coupling},
                 {"gamma", c.system.bath.gamma},
                 {"T", c.system.bath.temperature},
                 {"rho0", to_string(c.system.rho0)}};
  if (c.system.rho0_matrix) system["rho0_matrix"] = matrix_to_json(*c.system.rho0_matrix);
  return {{"system", system},
          {"grid", {{"t_f", c.grid.t_f}, {"T_tot", c.grid.t_total}}},
          {"network", to_json(c.network)},
          {"train", to_json(c.train)},
          {"rho_network", to_json(c.rho_network)},
          {"rho_train", to_json(c.rho_train)},
          {"oracle", {{"substeps", c.oracle_substeps}}},
          {"output", c.output}};
}

NetworkConfig matched_network(const NetworkConfig& base, Architecture target) {
  int width = 0;
  if (!base.shared_layers.empty()) {
    width = base.shared_layers.front();
  } else if (!base.branch_layers.empty()) {
    width = 2 * base.branch_layers.front();
  } else {
    throw ValidationError("matched_network: base config has no hidden layers");
  }
  const int half = std::max(1, width / 2);
  NetworkConfig c;
  switch (target) {
    case Architecture::kForked: c = NetworkConfig::forked(width, half, base.out_features); break;
    case Architecture::kUnified: c = NetworkConfig::unified(width, base.out_features); break;
    case Architecture::kSeparated: c = NetworkConfig::separated(half, base.out_features); break;
    case Architecture::kPlain: throw ValidationError("matched_network: plain has a single head");
  }
  c.activation = base.activation;
  c.dropout_rate = base.dropout_rate;
  c.layer_norm = base.layer_norm;
  c.seed = base.seed;
  return c;
}

void apply_override(Json& doc, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError("override '" + assignment + "': expected key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(raw);
  } catch (const Json::parse_error&) {
    value = raw;
  }
  if (!doc.is_object()) doc = Json::object();
  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ValidationError("override '" + assignment + "': empty path component");
    if (dot == std::string::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    Json& next = (*node)[part];
    if (next.is_null()) next = Json::object();
    if (!next.is_object()) {
      throw ValidationError("override '" + assignment + "': " + key.substr(0, dot) + " is not an object");
    }
    node = &next;
    start = dot + 1;
  }
}

}  // namespace fpinn
