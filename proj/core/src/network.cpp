// SPDX-License-Identifier: Apache-2.0
#include "fpinn/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fpinn/error.hpp"

namespace fpinn {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstWeightMap = Eigen::Map<const RowMajor>;
using WeightMap = Eigen::Map<RowMajor>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

ConstWeightMap weight_of(const ParamStore& p, const ParamRef& r) {
  return ConstWeightMap(p.data(r.group) + r.offset, r.rows, r.cols);
}
WeightMap weight_of(ParamStore& p, const ParamRef& r) {
  return WeightMap(p.data(r.group) + r.offset, r.rows, r.cols);
}
ConstVecMap vec_of(const ParamStore& p, const ParamRef& r) {
  return ConstVecMap(p.data(r.group) + r.offset, r.rows);
}
VecMap vec_of(ParamStore& p, const ParamRef& r) {
  return VecMap(p.data(r.group) + r.offset, r.rows);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a combined key
  std::uint64_t z = a * 0x9E3779B97F4A7C15ULL + b + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void require_finite(const Eigen::MatrixXd& m, const DenseLayer& layer, const char* what) {
  if (!m.allFinite()) {
    throw NumericalError("forward: non-finite " + std::string(what) + " in layer " + layer.name);
  }
}

}  // namespace

double silu(double x) { return x * sigmoid(x); }

double silu_prime(double x) {
  const double s = sigmoid(x);
  return s * (1.0 + x * (1.0 - s));
}

double silu_second(double x) {
  const double s = sigmoid(x);
  return s * (1.0 - s) * (2.0 + x * (1.0 - 2.0 * s));
}

std::vector<double> layer_norm(std::span<const double> v, std::span<const double> gain,
                               std::span<const double> bias) {
  if (gain.size() != v.size() || bias.size() != v.size()) {
    throw ValidationError("layer_norm: gain/bias size mismatch");
  }
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= n;
  const double inv_std = 1.0 / std::sqrt(var + kLayerNormEps);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = gain[i] * (v[i] - mean) * inv_std + bias[i];
  return out;
}

std::vector<double> dropout(std::span<const double> v, std::span<const std::uint8_t> keep,
                            double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ValidationError("dropout: rate must be in [0, 1)");
  if (keep.size() != v.size()) throw ValidationError("dropout: mask size mismatch");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = keep[i] ? v[i] / (1.0 - rate) : 0.0;
  return out;
}

std::string to_string(Architecture a) {
  switch (a) {
    case Architecture::kForked: return "forked";
    case Architecture::kUnified: return "unified";
    case Architecture::kSeparated: return "separated";
    case Architecture::kPlain: return "plain";
  }
  return "?";
}

Architecture architecture_from_string(const std::string& s) {
  if (s == "forked") return Architecture::kForked;
  if (s == "unified") return Architecture::kUnified;
  if (s == "separated") return Architecture::kSeparated;
  if (s == "plain") return Architecture::kPlain;
  throw ValidationError("unknown architecture '" + s +
                        "' (expected forked, unified, separated or plain)");
}

void NetworkConfig::validate() const {
  const auto fail = [](const std::string& m) { throw ValidationError("NetworkConfig: " + m); };
  if (activation != "silu") fail("only the 'silu' activation is supported");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) fail("dropout_rate must be in [0, 1)");
  for (int w : shared_layers)
    if (w < 1) fail("layer widths must be >= 1");
  for (int w : branch_layers)
    if (w < 1) fail("layer widths must be >= 1");
  if (out_features.empty()) fail("at least one head is required");
  for (int w : out_features)
    if (w < 1) fail("head output sizes must be >= 1");
  switch (architecture) {
    case Architecture::kForked:
      if (shared_layers.empty() || branch_layers.empty())
        fail("forked needs both shared and branch layers");
      break;
    case Architecture::kUnified:
      if (shared_layers.empty() || !branch_layers.empty())
        fail("unified needs shared layers and no branch layers");
      break;
    case Architecture::kSeparated:
      if (!shared_layers.empty() || branch_layers.empty())
        fail("separated needs branch layers and no shared layers");
      break;
    case Architecture::kPlain:
      if (out_features.size() != 1 || !branch_layers.empty())
        fail("plain is a single-head network without branch layers");
      break;
  }
}

NetworkConfig NetworkConfig::forked(int width, int branch_width, std::vector<int> outs) {
  NetworkConfig c;
  c.architecture = Architecture::kForked;
  c.shared_layers = {width, width, width};
  c.branch_layers = {branch_width};
  c.out_features = std::move(outs);
  return c;
}

NetworkConfig NetworkConfig::unified(int width, std::vector<int> outs) {
  NetworkConfig c;
  c.architecture = Architecture::kUnified;
  c.shared_layers = {width, width, width, width};
  c.out_features = std::move(outs);
  return c;
}

NetworkConfig NetworkConfig::separated(int width, std::vector<int> outs) {
  NetworkConfig c;
  c.architecture = Architecture::kSeparated;
  c.branch_layers = {width, width, width, width};
  c.out_features = std::move(outs);
  return c;
}

NetworkConfig NetworkConfig::plain(int width, int outs) {
  NetworkConfig c;
  c.architecture = Architecture::kPlain;
  c.shared_layers = {width, width, width};
  c.out_features = {outs};
  return c;
}

int ParamStore::add_group(std::string name) {
  if (group_index(name) >= 0) throw ValidationError("ParamStore: duplicate group " + name);
  groups_.push_back({std::move(name), {}});
  return static_cast<int>(groups_.size()) - 1;
}

std::size_t ParamStore::allocate(int group, std::size_t count) {
  auto& values = groups_.at(group).values;
  const std::size_t offset = values.size();
  values.resize(offset + count, 0.0);
  return offset;
}

int ParamStore::group_index(const std::string& name) const {
  for (std::size_t g = 0; g < groups_.size(); ++g)
    if (groups_[g].name == name) return static_cast<int>(g);
  return -1;
}

std::size_t ParamStore::size() const {
  std::size_t n = 0;
  for (const auto& g : groups_) n += g.values.size();
  return n;
}

ParamStore ParamStore::zeros_like() const {
  ParamStore z = *this;
  for (auto& g : z.groups_) std::fill(g.values.begin(), g.values.end(), 0.0);
  return z;
}

std::pair<ParamStore, Network> Network::build(const NetworkConfig& config) {
  config.validate();
  ParamStore params;
  Network net;
  net.config_ = config;

  const int n_heads = static_cast<int>(config.out_features.size());
  int trunk_group = -1;
  std::vector<int> head_group(n_heads);
  switch (config.architecture) {
    case Architecture::kForked:
      trunk_group = params.add_group("shared");
      for (int h = 0; h < n_heads; ++h) head_group[h] = params.add_group("branch" + std::to_string(h));
      break;
    case Architecture::kUnified:
    case Architecture::kPlain:
      trunk_group = params.add_group("all");
      std::fill(head_group.begin(), head_group.end(), trunk_group);
      break;
    case Architecture::kSeparated:
      for (int h = 0; h < n_heads; ++h) head_group[h] = params.add_group("net" + std::to_string(h));
      break;
  }

  int layer_id = 0;
  const auto make_layer = [&](int group, int in, int out, bool hidden, const std::string& name) {
    DenseLayer l;
    l.in = in;
    l.out = out;
    l.hidden = hidden;
    l.index = layer_id++;
    l.name = name;
    l.weight = {group, params.allocate(group, static_cast<std::size_t>(in) * out), out, in};
    l.bias = {group, params.allocate(group, out), out, 1};
    l.has_norm = hidden && config.layer_norm;
    if (l.has_norm) {
      l.norm_gain = {group, params.allocate(group, out), out, 1};
      l.norm_bias = {group, params.allocate(group, out), out, 1};
    }
    return l;
  };

  int width = 1;
  for (std::size_t i = 0; i < config.shared_layers.size(); ++i) {
    net.trunk_.push_back(make_layer(trunk_group, width, config.shared_layers[i], true,
                                    "shared" + std::to_string(i)));
    width = config.shared_layers[i];
  }
  const int trunk_width = width;
  for (int h = 0; h < n_heads; ++h) {
    std::vector<DenseLayer> chain;
    int w = trunk_width;
    const std::string prefix = "head" + std::to_string(h);
    for (std::size_t i = 0; i < config.branch_layers.size(); ++i) {
      chain.push_back(make_layer(head_group[h], w, config.branch_layers[i], true,
                                 prefix + ".hidden" + std::to_string(i)));
      w = config.branch_layers[i];
    }
    chain.push_back(make_layer(head_group[h], w, config.out_features[h], false, prefix + ".out"));
    net.heads_.push_back(std::move(chain));
  }

  std::mt19937_64 rng(config.seed);
  const auto init = [&](const DenseLayer& l) {
    std::uniform_real_distribution<double> dist(-1.0 / std::sqrt(l.in), 1.0 / std::sqrt(l.in));
    auto w = weight_of(params, l.weight);
    for (int i = 0; i < w.rows(); ++i)
      for (int j = 0; j < w.cols(); ++j) w(i, j) = dist(rng);
    auto b = vec_of(params, l.bias);
    for (int i = 0; i < b.size(); ++i) b(i) = dist(rng);
    if (l.has_norm) vec_of(params, l.norm_gain).setOnes();
  };
  for (const auto& l : net.trunk_) init(l);
  for (const auto& chain : net.heads_)
    for (const auto& l : chain) init(l);
  return {std::move(params), std::move(net)};
}

std::pair<ParamStore, Network> build_network(const NetworkConfig& config) {
  return Network::build(config);
}

std::size_t parameter_count(const NetworkConfig& config) {
  config.validate();
  std::size_t total = 0;
  const auto layer = [&](int in, int out, bool hidden) {
    total += static_cast<std::size_t>(in + 1) * out;
    if (hidden && config.layer_norm) total += 2 * static_cast<std::size_t>(out);
  };
  int width = 1;
  for (int w : config.shared_layers) {
    layer(width, w, true);
    width = w;
  }
  for (int outs : config.out_features) {
    int w = width;
    for (int b : config.branch_layers) {
      layer(w, b, true);
      w = b;
    }
    layer(w, outs, false);
  }
  return total;
}

std::vector<int> Network::groups_of_head(int head) const {
  std::vector<int> groups;
  const auto add = [&](const DenseLayer& l) {
    if (std::find(groups.begin(), groups.end(), l.weight.group) == groups.end())
      groups.push_back(l.weight.group);
  };
  for (const auto& l : trunk_) add(l);
  for (const auto& l : heads_.at(head)) add(l);
  return groups;
}

namespace {

struct ChainState {
  Eigen::MatrixXd value;
  Eigen::MatrixXd rate;
};

template <typename Cache>
void forward_layer(const DenseLayer& l, const ParamStore& p, const NetworkConfig& cfg,
                   RunMode mode, ChainState& s, Cache* cache) {
  // Copied so that Eigen sees the same alignment on every call; kernels over
  // a raw map peel a variable number of elements and the sums drift by an ulp.
  const RowMajor w = weight_of(p, l.weight);
  const Eigen::VectorXd b = vec_of(p, l.bias);
  Eigen::MatrixXd pre = w * s.value;
  pre.colwise() += b;
  Eigen::MatrixXd pre_rate = w * s.rate;
  require_finite(pre, l, "pre-activation");
  require_finite(pre_rate, l, "pre-activation rate");
  if (cache) {
    cache->in = std::move(s.value);
    cache->in_rate = std::move(s.rate);
  }
  if (!l.hidden) {
    s.value = std::move(pre);
    s.rate = std::move(pre_rate);
    return;
  }

  Eigen::MatrixXd a(pre.rows(), pre.cols());
  Eigen::MatrixXd a_rate(pre.rows(), pre.cols());
  Eigen::MatrixXd sig(pre.rows(), pre.cols());
  for (Eigen::Index j = 0; j < pre.cols(); ++j)
    for (Eigen::Index i = 0; i < pre.rows(); ++i) {
      const double z = pre(i, j);
      const double sg = sigmoid(z);
      sig(i, j) = sg;
      a(i, j) = z * sg;
      a_rate(i, j) = sg * (1.0 + z * (1.0 - sg)) * pre_rate(i, j);
    }

  Eigen::VectorXd keep_scale;
  if (mode.train && cfg.dropout_rate > 0.0) {
    std::mt19937_64 rng(mix(mix(cfg.seed, mode.epoch_seed), static_cast<std::uint64_t>(l.index)));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    keep_scale.resize(l.out);
    for (int i = 0; i < l.out; ++i)
      keep_scale(i) = u(rng) < cfg.dropout_rate ? 0.0 : 1.0 / (1.0 - cfg.dropout_rate);
    a.array().colwise() *= keep_scale.array();
    a_rate.array().colwise() *= keep_scale.array();
  }

  if (cache) {
    cache->pre = std::move(pre);
    cache->pre_rate = std::move(pre_rate);
    cache->sig = std::move(sig);
    cache->keep_scale = keep_scale;
  }

  if (!l.has_norm) {
    s.value = std::move(a);
    s.rate = std::move(a_rate);
    return;
  }

  const auto gain = vec_of(p, l.norm_gain);
  const auto nbias = vec_of(p, l.norm_bias);
  const Eigen::RowVectorXd mean = a.colwise().mean();
  const Eigen::RowVectorXd mean_rate = a_rate.colwise().mean();
  Eigen::MatrixXd c = a.rowwise() - mean;
  Eigen::MatrixXd c_rate = a_rate.rowwise() - mean_rate;
  const Eigen::RowVectorXd var = c.array().square().colwise().mean();
  const Eigen::RowVectorXd var_rate = 2.0 * (c.array() * c_rate.array()).colwise().mean();
  const Eigen::RowVectorXd r = (var.array() + kLayerNormEps).rsqrt();
  const Eigen::RowVectorXd r_rate = -0.5 * r.array().cube() * var_rate.array();
  Eigen::MatrixXd n = c.array().rowwise() * r.array();
  Eigen::MatrixXd n_rate =
      (c_rate.array().rowwise() * r.array()) + (c.array().rowwise() * r_rate.array());
  s.value = (n.array().colwise() * gain.array()).colwise() + nbias.array();
  s.rate = n_rate.array().colwise() * gain.array();
  require_finite(s.value, l, "layer-norm output");
  if (cache) {
    cache->centered = std::move(c);
    cache->centered_rate = std::move(c_rate);
    cache->inv_std = r;
    cache->inv_std_rate = r_rate;
    cache->normed = std::move(n);
    cache->normed_rate = std::move(n_rate);
  }
}

/// Pulls (gy, gy_rate) back through one layer, accumulating parameter
/// gradients into `grads`. On return `g` holds the adjoint of the layer input.
template <typename Cache>
void backward_layer(const DenseLayer& l, const ParamStore& p, ParamStore& grads,
                    const Cache& cache, ChainState& g, bool need_input_grad) {
  Eigen::MatrixXd g_pre, g_pre_rate;
  if (!l.hidden) {
    g_pre = std::move(g.value);
    g_pre_rate = std::move(g.rate);
  } else {
    Eigen::MatrixXd ga, ga_rate;
    if (l.has_norm) {
      const auto gain = vec_of(p, l.norm_gain);
      const Eigen::VectorXd d_gain =
          (g.value.cwiseProduct(cache.normed) + g.rate.cwiseProduct(cache.normed_rate)).rowwise().sum();
      const Eigen::VectorXd d_bias = g.value.rowwise().sum();
      vec_of(grads, l.norm_gain) += d_gain;
      vec_of(grads, l.norm_bias) += d_bias;

      const double inv_n = 1.0 / static_cast<double>(l.out);
      const auto& c = cache.centered;
      const auto& c_rate = cache.centered_rate;
      const auto& r = cache.inv_std;
      const auto& r_rate = cache.inv_std_rate;
      const Eigen::MatrixXd gn = g.value.array().colwise() * gain.array();
      const Eigen::MatrixXd gn_rate = g.rate.array().colwise() * gain.array();

      // n = c·r, ṅ = ċ·r + c·ṙ
      Eigen::MatrixXd gc = (gn.array().rowwise() * r.array()) +
                           (gn_rate.array().rowwise() * r_rate.array());
      Eigen::MatrixXd gc_rate = gn_rate.array().rowwise() * r.array();
      Eigen::RowVectorXd gr = (gn.cwiseProduct(c) + gn_rate.cwiseProduct(c_rate)).colwise().sum();
      const Eigen::RowVectorXd gr_rate = gn_rate.cwiseProduct(c).colwise().sum();
      // ṙ = −½ r³ v̇  ⇒  ∂ṙ/∂r = 3ṙ/r, ∂ṙ/∂v̇ = −½ r³
      gr.array() += gr_rate.array() * 3.0 * r_rate.array() / r.array();
      const Eigen::RowVectorXd g_var_rate = gr_rate.array() * (-0.5) * r.array().cube();
      // v̇ = (2/N) Σ c·ċ
      gc.array() += 2.0 * inv_n * (c_rate.array().rowwise() * g_var_rate.array());
      gc_rate.array() += 2.0 * inv_n * (c.array().rowwise() * g_var_rate.array());
      // r = (v + ε)^{-1/2}, v = (1/N) Σ c²
      const Eigen::RowVectorXd g_var = gr.array() * (-0.5) * r.array().cube();
      gc.array() += 2.0 * inv_n * (c.array().rowwise() * g_var.array());
      // c = a − mean(a)
      ga = gc.rowwise() - gc.colwise().mean();
      ga_rate = gc_rate.rowwise() - gc_rate.colwise().mean();
    } else {
      ga = std::move(g.value);
      ga_rate = std::move(g.rate);
    }
    if (cache.keep_scale.size() > 0) {
      ga.array().colwise() *= cache.keep_scale.array();
      ga_rate.array().colwise() *= cache.keep_scale.array();
    }
    g_pre.resize(ga.rows(), ga.cols());
    g_pre_rate.resize(ga.rows(), ga.cols());
    for (Eigen::Index j = 0; j < ga.cols(); ++j)
      for (Eigen::Index i = 0; i < ga.rows(); ++i) {
        const double z = cache.pre(i, j);
        const double sg = cache.sig(i, j);
        const double sp = sg * (1.0 + z * (1.0 - sg));
        const double spp = sg * (1.0 - sg) * (2.0 + z * (1.0 - 2.0 * sg));
        g_pre(i, j) = ga(i, j) * sp + ga_rate(i, j) * spp * cache.pre_rate(i, j);
        g_pre_rate(i, j) = ga_rate(i, j) * sp;
      }
  }

  RowMajor gw(l.out, l.in);
  gw.noalias() = g_pre * cache.in.transpose();
  gw.noalias() += g_pre_rate * cache.in_rate.transpose();
  weight_of(grads, l.weight) += gw;
  const Eigen::VectorXd gb = g_pre.rowwise().sum();
  vec_of(grads, l.bias) += gb;
  if (need_input_grad) {
    const RowMajor w = weight_of(p, l.weight);
    g.value.noalias() = w.transpose() * g_pre;
    g.rate.noalias() = w.transpose() * g_pre_rate;
  }
}

}  // namespace

std::vector<HeadTrace> Network::forward(const ParamStore& params, std::span<const double> times,
                                        RunMode mode, Tape* tape) const {
  const auto n = static_cast<Eigen::Index>(times.size());
  for (double t : times)
    if (!std::isfinite(t)) throw ValidationError("forward: non-finite input time");

  ChainState input{Eigen::MatrixXd(1, n), Eigen::MatrixXd::Ones(1, n)};
  for (Eigen::Index j = 0; j < n; ++j) input.value(0, j) = times[j];

  if (tape) {
    *tape = Tape{};
    tape->params_ = &params;
    tape->samples_ = static_cast<int>(n);
    tape->trunk_.resize(trunk_.size());
    tape->heads_.resize(heads_.size());
  }

  ChainState trunk = std::move(input);
  for (std::size_t i = 0; i < trunk_.size(); ++i) {
    forward_layer(trunk_[i], params, config_, mode, trunk, tape ? &tape->trunk_[i] : nullptr);
  }

  std::vector<HeadTrace> out;
  out.reserve(heads_.size());
  for (std::size_t h = 0; h < heads_.size(); ++h) {
    ChainState s = trunk;
    if (tape) tape->heads_[h].resize(heads_[h].size());
    for (std::size_t i = 0; i < heads_[h].size(); ++i) {
      forward_layer(heads_[h][i], params, config_, mode, s, tape ? &tape->heads_[h][i] : nullptr);
    }
    out.push_back({std::move(s.value), std::move(s.rate)});
  }
  return out;
}

EvalOutput Network::evaluate(const ParamStore& params, double t, RunMode mode) const {
  const double times[1] = {t};
  const auto heads = forward(params, times, mode);
  EvalOutput out;
  for (const auto& h : heads) {
    out.features.emplace_back(h.value.data(), h.value.data() + h.value.size());
    out.dfeatures_dt.emplace_back(h.rate.data(), h.rate.data() + h.rate.size());
  }
  return out;
}

ParamStore Network::backward(Tape& tape, std::span<const HeadTrace> adjoints) const {
  if (tape.consumed_) throw ValidationError("backward: tape has already been consumed");
  if (!tape.params_) throw ValidationError("backward: tape holds no recorded forward pass");
  if (adjoints.size() != heads_.size()) throw ValidationError("backward: one adjoint per head required");
  tape.consumed_ = true;

  const ParamStore& params = *tape.params_;
  ParamStore grads = params.zeros_like();
  const Eigen::Index n = tape.samples_;

  ChainState trunk_adj;
  bool have_trunk_adj = false;
  for (std::size_t h = 0; h < heads_.size(); ++h) {
    const HeadTrace& adj = adjoints[h];
    if (adj.value.rows() != head_size(static_cast<int>(h)) || adj.value.cols() != n ||
        adj.rate.rows() != adj.value.rows() || adj.rate.cols() != n) {
      throw ValidationError("backward: adjoint shape does not match head output");
    }
    ChainState g{adj.value, adj.rate};
    for (std::size_t i = heads_[h].size(); i-- > 0;) {
      const bool need_input = i > 0 || !trunk_.empty();
      backward_layer(heads_[h][i], params, grads, tape.heads_[h][i], g, need_input);
    }
    if (trunk_.empty()) continue;
    if (!have_trunk_adj) {
      trunk_adj = std::move(g);
      have_trunk_adj = true;
    } else {
      trunk_adj.value += g.value;
      trunk_adj.rate += g.rate;
    }
  }
  if (have_trunk_adj) {
    for (std::size_t i = trunk_.size(); i-- > 0;) {
      backward_layer(trunk_[i], params, grads, tape.trunk_[i], trunk_adj, i > 0);
    }
  }
  return grads;
}

}  // namespace fpinn
