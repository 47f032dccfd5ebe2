// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fpinn {

// ---------------------------------------------------------------------------
// Elementwise building blocks. The network applies the batched equivalents of
// these in the order linear -> SiLU -> dropout -> layer norm.

constexpr double kLayerNormEps = 1e-5;

/// x·sigmoid(x).
double silu(double x);
/// d silu / dx.
double silu_prime(double x);
/// d² silu / dx².
double silu_second(double x);

/// Normalizes to zero mean and unit (biased) variance, then applies gain/bias.
std::vector<double> layer_norm(std::span<const double> v, std::span<const double> gain,
                               std::span<const double> bias);

/// Zeroes entries with keep[i] == 0 and scales survivors by 1/(1 − rate).
std::vector<double> dropout(std::span<const double> v, std::span<const std::uint8_t> keep,
                            double rate);

// ---------------------------------------------------------------------------

enum class Architecture {
  kForked,     ///< shared trunk, one hidden layer + output per head
  kUnified,    ///< shared trunk, heads split at the output layer only
  kSeparated,  ///< one independent network per head
  kPlain,      ///< single-head MLP
};

std::string to_string(Architecture a);
Architecture architecture_from_string(const std::string& s);

struct NetworkConfig {
  Architecture architecture = Architecture::kForked;
  std::vector<int> shared_layers;  ///< trunk hidden widths
  std::vector<int> branch_layers;  ///< hidden widths of each head's own stack
  std::vector<int> out_features;   ///< output size per head
  std::string activation = "silu";
  double dropout_rate = 0.1;
  bool layer_norm = true;
  std::uint64_t seed = 0;

  void validate() const;

  /// Trunk of three `width` layers, one `branch_width` hidden layer per head.
  static NetworkConfig forked(int width, int branch_width, std::vector<int> outs);
  /// Four shared `width` layers with linear output heads.
  static NetworkConfig unified(int width, std::vector<int> outs);
  /// One four-layer `width` network per head.
  static NetworkConfig separated(int width, std::vector<int> outs);
  /// Three `width` layers and a single output head.
  static NetworkConfig plain(int width, int outs);

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// Parameter groups. Each group is a flat array; groups never overlap, and
/// the set of groups is fixed once the network is built.
class ParamStore {
 public:
  struct Group {
    std::string name;
    std::vector<double> values;
    friend bool operator==(const Group&, const Group&) = default;
  };

  int add_group(std::string name);
  /// Reserves `count` zero-initialized slots at the end of `group`.
  std::size_t allocate(int group, std::size_t count);

  int group_count() const { return static_cast<int>(groups_.size()); }
  int group_index(const std::string& name) const;
  const Group& group(int g) const { return groups_.at(g); }
  Group& group(int g) { return groups_.at(g); }
  const std::vector<Group>& groups() const { return groups_; }
  std::size_t size() const;

  /// Same layout, all zeros.
  ParamStore zeros_like() const;

  double* data(int g) { return groups_.at(g).values.data(); }
  const double* data(int g) const { return groups_.at(g).values.data(); }

  friend bool operator==(const ParamStore&, const ParamStore&) = default;

 private:
  std::vector<Group> groups_;
};

/// Location of one tensor inside a ParamStore group.
struct ParamRef {
  int group = 0;
  std::size_t offset = 0;
  int rows = 0;
  int cols = 0;
};

struct DenseLayer {
  int in = 0;
  int out = 0;
  ParamRef weight;  ///< out × in, row-major
  ParamRef bias;    ///< out
  bool hidden = true;  ///< hidden layers get SiLU, dropout and (optionally) layer norm
  bool has_norm = false;
  ParamRef norm_gain;
  ParamRef norm_bias;
  int index = 0;  ///< global layer id, used to seed dropout masks
  std::string name;
};

/// Values and exact time derivatives of one head, features × samples.
struct HeadTrace {
  Eigen::MatrixXd value;
  Eigen::MatrixXd rate;
};

/// Single-time evaluation: per-head features and d(features)/dt.
struct EvalOutput {
  std::vector<std::vector<double>> features;
  std::vector<std::vector<double>> dfeatures_dt;
};

/// Evaluation mode. Training draws one dropout mask per hidden layer from
/// (network seed, epoch_seed, layer) and keeps it for every sample of the
/// call, so the network stays a single smooth function of t.
struct RunMode {
  bool train = false;
  std::uint64_t epoch_seed = 0;

  static RunMode eval() { return {}; }
  static RunMode training(std::uint64_t epoch_seed) { return {true, epoch_seed}; }
};

class Network;

/// Record of one batched forward pass: everything backward() needs to push
/// adjoints of the head outputs (values and rates) back to the parameters.
class Tape {
 public:
  bool consumed() const { return consumed_; }

 private:
  friend class Network;

  struct LayerCache {
    Eigen::MatrixXd in, in_rate;        // layer input
    Eigen::MatrixXd pre, pre_rate;      // W·x + b
    Eigen::MatrixXd sig;                // sigmoid(pre)
    Eigen::VectorXd keep_scale;         // dropout multiplier per unit (empty if none)
    Eigen::MatrixXd centered, centered_rate;  // layer-norm x − μ and its rate
    Eigen::RowVectorXd inv_std, inv_std_rate;
    Eigen::MatrixXd normed, normed_rate;
  };

  const class ParamStore* params_ = nullptr;
  std::vector<LayerCache> trunk_;
  std::vector<std::vector<LayerCache>> heads_;
  int samples_ = 0;
  bool consumed_ = false;
};

class Network {
 public:
  /// Builds the layer graph and a seeded uniform(±1/√fan_in) initialization.
  static std::pair<ParamStore, Network> build(const NetworkConfig& config);

  const NetworkConfig& config() const { return config_; }
  int head_count() const { return static_cast<int>(heads_.size()); }
  int head_size(int head) const { return config_.out_features.at(head); }
  const std::vector<DenseLayer>& trunk() const { return trunk_; }
  const std::vector<DenseLayer>& head_layers(int head) const { return heads_.at(head); }
  /// Parameter groups that head `head` can reach.
  std::vector<int> groups_of_head(int head) const;

  /// Batched forward pass over `times`; records into `tape` when given.
  std::vector<HeadTrace> forward(const ParamStore& params, std::span<const double> times,
                                 RunMode mode, Tape* tape = nullptr) const;

  /// Single-time convenience wrapper around forward().
  EvalOutput evaluate(const ParamStore& params, double t, RunMode mode) const;

  /// Reverse accumulation of head adjoints (∂L/∂value, ∂L/∂rate per head) to
  /// every parameter. The tape can be consumed once.
  ParamStore backward(Tape& tape, std::span<const HeadTrace> adjoints) const;

 private:
  NetworkConfig config_;
  std::vector<DenseLayer> trunk_;
  std::vector<std::vector<DenseLayer>> heads_;
};

std::pair<ParamStore, Network> build_network(const NetworkConfig& config);

/// Closed-form parameter count for a config (used by tests and reports).
std::size_t parameter_count(const NetworkConfig& config);

}  // namespace fpinn
