// SPDX-License-Identifier: Apache-2.0
#include "fpinn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "fpinn/error.hpp"
#include "fpinn/serialize.hpp"

namespace fpinn {

namespace {

constexpr char kMagic[8] = {'F', 'P', 'I', 'N', 'N', 'C', 'K', 'P'};

template <typename T>
void put_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  Reader(std::string data, std::string name) : data_(std::move(data)), name_(std::move(name)) {}

  template <typename T>
  T le() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<T>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return v;
  }

  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw ValidationError(name_ + ": truncated checkpoint");
  }

  std::string data_;
  std::string name_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const NetworkConfig& config,
                     const ParamStore& params, const nlohmann::json& meta) {
  Json groups = Json::array();
  for (const auto& g : params.groups()) groups.push_back({{"name", g.name}, {"count", g.values.size()}});
  const std::string header = Json{{"network", to_json(config)}, {"groups", groups}, {"meta", meta}}.dump();

  std::string out(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, header.size());
  out += header;
  for (const auto& g : params.groups())
    for (double v : g.values) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ValidationError("cannot open checkpoint for writing: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw ValidationError("failed writing checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open checkpoint: " + path.string());
  Reader in(std::string(std::istreambuf_iterator<char>(f), {}), path.string());

  if (in.bytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw ValidationError(path.string() + ": not an fpinn checkpoint (bad magic)");
  }
  const auto version = in.le<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw ValidationError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
  }
  const auto header_len = in.le<std::uint64_t>();
  Json header;
  try {
    header = Json::parse(in.bytes(header_len));
  } catch (const Json::parse_error& e) {
    throw ValidationError(path.string() + ": corrupt checkpoint header: " + e.what());
  }
  json_util::require_keys(header, "checkpoint", {"network", "groups", "meta"});

  Checkpoint ckpt;
  ckpt.config = network_config_from_json(header.at("network"), "checkpoint.network");
  ckpt.meta = header.at("meta");
  for (const auto& g : header.at("groups")) {
    const int idx = ckpt.params.add_group(json_util::get_string(g.at("name"), "checkpoint.groups.name"));
    const auto count = json_util::get_unsigned(g.at("count"), "checkpoint.groups.count");
    ckpt.params.allocate(idx, count);
    for (auto& v : ckpt.params.group(idx).values) v = std::bit_cast<double>(in.le<std::uint64_t>());
  }
  if (!in.done()) throw ValidationError(path.string() + ": trailing bytes after parameter payload");
  return ckpt;
}

Model model_from_checkpoint(const Checkpoint& ckpt) {
  auto [params, network] = Network::build(ckpt.config);
  if (params.group_count() != ckpt.params.group_count()) {
    throw ValidationError("checkpoint parameter groups do not match its network config");
  }
  for (int g = 0; g < params.group_count(); ++g) {
    if (params.group(g).name != ckpt.params.group(g).name ||
        params.group(g).values.size() != ckpt.params.group(g).values.size()) {
      throw ValidationError("checkpoint group '" + ckpt.params.group(g).name +
                            "' does not match its network config");
    }
  }
  return {std::move(network), ckpt.params};
}

}  // namespace fpinn
