// SPDX-License-Identifier: Apache-2.0
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>

#include <gtest/gtest.h>

#include "fpinn/checkpoint.hpp"
#include "fpinn/error.hpp"
#include "test_support.hpp"

namespace fpinn {
namespace {

namespace fs = std::filesystem;

fs::path temp_path(const std::string& name) {
  const fs::path p = fs::path(::testing::TempDir()) / name;
  fs::remove(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

void spit(const fs::path& p, const std::string& bytes) { std::ofstream(p, std::ios::binary) << bytes; }

TEST(Checkpoint, BitExactRoundTrip) {
  testing::Gen g(5);
  for (const NetworkConfig& base : {NetworkConfig::forked(9, 5, {4, 4}), NetworkConfig::separated(6, {4, 4}),
                                    NetworkConfig::plain(7, 16)}) {
    NetworkConfig c = base;
    c.seed = 12;
    const auto [clean, net] = build_network(c);
    ParamStore params = clean;
    // Awkward values: subnormal, signed zero, extreme, NaN payload.
    params.group(0).values[0] = 5e-324;
    params.group(0).values[1] = -0.0;
    params.group(0).values[2] = 1.7976931348623157e308;
    params.group(0).values[3] = -std::numeric_limits<double>::infinity();
    const fs::path p = temp_path("rt.ckpt");
    save_checkpoint(p, c, params, {{"phase", "operators"}, {"epochs", 3}});
    const Checkpoint back = load_checkpoint(p);
    EXPECT_EQ(back.config, c);
    ASSERT_EQ(back.params.group_count(), params.group_count());
    for (int grp = 0; grp < params.group_count(); ++grp) {
      EXPECT_EQ(back.params.group(grp).name, params.group(grp).name);
      const auto& a = params.group(grp).values;
      const auto& b = back.params.group(grp).values;
      ASSERT_EQ(a.size(), b.size());
      EXPECT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)), 0);
    }
    EXPECT_EQ(back.meta.at("phase"), "operators");

    const fs::path q = temp_path("clean.ckpt");
    save_checkpoint(q, c, clean, nlohmann::json::object());
    const Model m = model_from_checkpoint(load_checkpoint(q));
    const std::vector<double> times{0.0, 1.0, 2.0};
    EXPECT_EQ(m.network.forward(m.params, times, RunMode::eval())[0].value,
              net.forward(clean, times, RunMode::eval())[0].value);
  }
}

TEST(Checkpoint, HeaderLayout) {
  const auto [params, net] = build_network(NetworkConfig::plain(3, 2));
  const fs::path p = temp_path("layout.ckpt");
  save_checkpoint(p, net.config(), params, nlohmann::json::object());
  const std::string bytes = slurp(p);
  ASSERT_GE(bytes.size(), 20u);
  EXPECT_EQ(bytes.substr(0, 8), "FPINNCKP");
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), kCheckpointVersion);
  // Payload is the last size()*8 bytes, little-endian f64.
  const std::size_t payload = params.size() * 8;
  double first = 0.0;
  std::memcpy(&first, bytes.data() + bytes.size() - payload, 8);
  EXPECT_EQ(first, params.group(0).values[0]);
}

TEST(Checkpoint, RejectsCorruption) {
  const auto [params, net] = build_network(NetworkConfig::plain(3, 2));
  const fs::path p = temp_path("bad.ckpt");
  save_checkpoint(p, net.config(), params, nlohmann::json::object());
  const std::string good = slurp(p);

  spit(p, "XPINNCKP" + good.substr(8));
  EXPECT_THROW(load_checkpoint(p), ValidationError);

  std::string version = good;
  version[8] = 9;
  spit(p, version);
  EXPECT_THROW(load_checkpoint(p), ValidationError);

  spit(p, good.substr(0, good.size() - 3));
  EXPECT_THROW(load_checkpoint(p), ValidationError);

  spit(p, good + "x");
  EXPECT_THROW(load_checkpoint(p), ValidationError);

  EXPECT_THROW(load_checkpoint(temp_path("missing.ckpt")), ValidationError);
}

TEST(Checkpoint, GroupLayoutMustMatchConfig) {
  const auto [params, net] = build_network(NetworkConfig::plain(3, 2));
  Checkpoint c{NetworkConfig::plain(4, 2), params, nlohmann::json::object()};
  EXPECT_THROW(model_from_checkpoint(c), ValidationError);
}

}  // namespace
}  // namespace fpinn
