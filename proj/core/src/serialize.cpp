// SPDX-License-Identifier: Apache-2.0
#include "fpinn/serialize.hpp"

#include <algorithm>
#include <cmath>

#include "fpinn/error.hpp"

namespace fpinn {

namespace json_util {

namespace {

[[noreturn]] void type_error(const std::string& path, const char* expected, const Json& j) {
  throw ValidationError(path + ": expected " + expected + ", got " + std::string(j.type_name()));
}

}  // namespace

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) type_error(path, "an object", j);
}

void require_keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  require_object(j, path);
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) {
      std::string list;
      for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
      throw ValidationError(path + "." + key + ": unknown key (allowed: " + list + ")");
    }
  }
}

double get_number(const Json& j, const std::string& path) {
  if (!j.is_number()) type_error(path, "a number", j);
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(path + ": must be finite");
  return v;
}

long long get_integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) type_error(path, "an integer", j);
  return j.get<long long>();
}

std::uint64_t get_unsigned(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<long long>() < 0)) {
    type_error(path, "a non-negative integer", j);
  }
  return j.get<std::uint64_t>();
}

bool get_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) type_error(path, "a boolean", j);
  return j.get<bool>();
}

std::string get_string(const Json& j, const std::string& path) {
  if (!j.is_string()) type_error(path, "a string", j);
  return j.get<std::string>();
}

}  // namespace json_util

using namespace json_util;

namespace {

std::vector<int> get_int_list(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path + ": expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(static_cast<int>(get_integer(j[i], path + "[" + std::to_string(i) + "]")));
  }
  return out;
}

std::vector<double> get_number_list(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace

Json to_json(const NetworkConfig& c) {
  return {{"architecture", to_string(c.architecture)},
          {"shared_layers", c.shared_layers},
          {"branch_layers", c.branch_layers},
          {"out_features", c.out_features},
          {"activation", c.activation},
          {"dropout_rate", c.dropout_rate},
          {"layer_norm", c.layer_norm},
          {"seed", c.seed}};
}

NetworkConfig network_config_from_json(const Json& j, const std::string& path, NetworkConfig base) {
  require_keys(j, path,
               {"architecture", "shared_layers", "branch_layers", "out_features", "activation",
                "dropout_rate", "layer_norm", "seed"});
  NetworkConfig c = std::move(base);
  const auto at = [&](const char* k) { return path + "." + k; };
  if (j.contains("architecture")) {
    try {
      c.architecture = architecture_from_string(get_string(j["architecture"], at("architecture")));
    } catch (const ValidationError& e) {
      throw ValidationError(at("architecture") + ": " + e.what());
    }
  }
  if (j.contains("shared_layers")) c.shared_layers = get_int_list(j["shared_layers"], at("shared_layers"));
  if (j.contains("branch_layers")) c.branch_layers = get_int_list(j["branch_layers"], at("branch_layers"));
  if (j.contains("out_features")) c.out_features = get_int_list(j["out_features"], at("out_features"));
  if (j.contains("activation")) c.activation = get_string(j["activation"], at("activation"));
  if (j.contains("dropout_rate")) c.dropout_rate = get_number(j["dropout_rate"], at("dropout_rate"));
  if (j.contains("layer_norm")) c.layer_norm = get_bool(j["layer_norm"], at("layer_norm"));
  if (j.contains("seed")) c.seed = get_unsigned(j["seed"], at("seed"));
  return c;
}

Json to_json(const TrainConfig& c) {
  return {{"eta0", c.eta0},
          {"eta_min", c.eta_min},
          {"T_max", c.t_max},
          {"weight_decay", c.weight_decay},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"adam_eps", c.adam_eps},
          {"lambda_er", c.lambda_er},
          {"tau", c.tau},
          {"seed", c.seed},
          {"deterministic", c.deterministic}};
}

TrainConfig train_config_from_json(const Json& j, const std::string& path, TrainConfig base) {
  require_keys(j, path,
               {"eta0", "eta_min", "T_max", "weight_decay", "beta1", "beta2", "adam_eps", "lambda_er",
                "tau", "seed", "deterministic"});
  TrainConfig c = base;
  const auto at = [&](const char* k) { return path + "." + k; };
  const auto number = [&](const char* k, double& field) {
    if (j.contains(k)) field = get_number(j[k], at(k));
  };
  number("eta0", c.eta0);
  number("eta_min", c.eta_min);
  number("weight_decay", c.weight_decay);
  number("beta1", c.beta1);
  number("beta2", c.beta2);
  number("adam_eps", c.adam_eps);
  number("lambda_er", c.lambda_er);
  number("tau", c.tau);
  if (j.contains("T_max")) c.t_max = static_cast<int>(get_integer(j["T_max"], at("T_max")));
  if (j.contains("seed")) c.seed = get_unsigned(j["seed"], at("seed"));
  if (j.contains("deterministic")) c.deterministic = get_bool(j["deterministic"], at("deterministic"));
  return c;
}

Json to_json(const BathParams& b) {
  return {{"Gamma", b.coupling}, {"gamma", b.gamma}, {"T", b.temperature}};
}

Json to_json(const TimeGrid& g) { return {{"t_f", g.size()}, {"T_tot", g.t_total()}}; }

Json to_json(const LossBreakdown& b) {
  return {{"epoch", b.epoch}, {"lr", b.lr}, {"total", b.total},
          {"mod", b.mod},     {"ini", b.ini}, {"er", b.er}};
}

LossBreakdown loss_breakdown_from_json(const Json& j) {
  require_keys(j, "loss", {"epoch", "lr", "total", "mod", "ini", "er"});
  LossBreakdown b;
  b.epoch = static_cast<int>(get_integer(j.at("epoch"), "loss.epoch"));
  b.lr = get_number(j.at("lr"), "loss.lr");
  b.total = get_number(j.at("total"), "loss.total");
  b.mod = get_number_list(j.at("mod"), "loss.mod");
  b.ini = get_number_list(j.at("ini"), "loss.ini");
  b.er = get_number_list(j.at("er"), "loss.er");
  return b;
}

Json to_json(const RunRecord& r) {
  Json history = Json::array();
  for (const auto& b : r.history) history.push_back(to_json(b));
  return {{"phase", r.phase},
          {"config", r.config},
          {"history", std::move(history)},
          {"final_eval", to_json(r.final_eval)},
          {"checkpoint", r.checkpoint},
          {"wall_seconds", r.wall_seconds}};
}

RunRecord run_record_from_json(const Json& j) {
  require_keys(j, "run", {"phase", "config", "history", "final_eval", "checkpoint", "wall_seconds"});
  RunRecord r;
  r.phase = get_string(j.at("phase"), "run.phase");
  r.config = j.at("config");
  if (!j.at("history").is_array()) throw ValidationError("run.history: expected an array");
  for (const auto& b : j.at("history")) r.history.push_back(loss_breakdown_from_json(b));
  r.final_eval = loss_breakdown_from_json(j.at("final_eval"));
  r.checkpoint = get_string(j.at("checkpoint"), "run.checkpoint");
  r.wall_seconds = get_number(j.at("wall_seconds"), "run.wall_seconds");
  return r;
}

}  // namespace fpinn
