// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>

#include <nlohmann/json.hpp>

#include "fpinn/network.hpp"
#include "fpinn/optim.hpp"
#include "fpinn/oracle.hpp"
#include "fpinn/quantum_models.hpp"
#include "fpinn/trainer.hpp"

namespace fpinn {

using Json = nlohmann::json;

// Parsers are strict: unknown keys and wrong types throw ValidationError with
// the JSON path of the offending entry (e.g. "network.dropout_rate").
// Missing keys keep their defaults.

Json to_json(const NetworkConfig& c);
/// Keys absent from `j` keep the value they have in `base`.
NetworkConfig network_config_from_json(const Json& j, const std::string& path = "network",
                                       NetworkConfig base = {});

Json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const Json& j, const std::string& path = "train",
                                   TrainConfig base = {});

Json to_json(const BathParams& b);
Json to_json(const TimeGrid& g);

Json to_json(const LossBreakdown& b);
LossBreakdown loss_breakdown_from_json(const Json& j);

Json to_json(const RunRecord& r);
RunRecord run_record_from_json(const Json& j);

/// Type-checked accessors used by the strict parsers.
namespace json_util {

/// Throws unless every key of `j` is in `allowed`.
void require_keys(const Json& j, const std::string& path,
                  std::initializer_list<const char*> allowed);
void require_object(const Json& j, const std::string& path);
double get_number(const Json& j, const std::string& path);
long long get_integer(const Json& j, const std::string& path);
std::uint64_t get_unsigned(const Json& j, const std::string& path);
bool get_bool(const Json& j, const std::string& path);
std::string get_string(const Json& j, const std::string& path);

}  // namespace json_util

}  // namespace fpinn
