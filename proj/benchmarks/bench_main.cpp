// SPDX-License-Identifier: Apache-2.0
// Micro benchmarks for the hot paths of a training epoch and the oracle.
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "fpinn/linalg.hpp"
#include "fpinn/losses.hpp"
#include "fpinn/network.hpp"
#include "fpinn/oracle.hpp"
#include "fpinn/quantum_models.hpp"
#include "fpinn/trainer.hpp"

namespace fpinn {
namespace {

std::vector<double> grid_times(int n) { return TimeGrid(n, 6.0).times(); }

NetworkConfig forked(int width) {
  NetworkConfig c = NetworkConfig::forked(width, width / 2, operator_head_sizes(spin_boson_spec(BathParams{})));
  c.seed = 1;
  return c;
}

// state.range(0): trunk width. 201 collocation points.
void BM_Forward(benchmark::State& state) {
  const auto [params, net] = build_network(forked(static_cast<int>(state.range(0))));
  const auto times = grid_times(201);
  std::uint64_t epoch = 0;
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(params, times, RunMode::training(++epoch)));
}
BENCHMARK(BM_Forward)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_ForwardBackward(benchmark::State& state) {
  const auto [params, net] = build_network(forked(static_cast<int>(state.range(0))));
  const auto times = grid_times(201);
  std::uint64_t epoch = 0;
  for (auto _ : state) {
    Tape tape;
    const auto out = net.forward(params, times, RunMode::training(++epoch), &tape);
    benchmark::DoNotOptimize(net.backward(tape, out));
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

// Whole operator-phase epochs, including losses and the AdamW step.
void BM_OperatorEpochs(benchmark::State& state) {
  const SystemSpec spec = spin_boson_spec(BathParams{});
  NetworkConfig net = forked(static_cast<int>(state.range(0)));
  TrainConfig train;
  train.t_max = 10;
  const TimeGrid grid(201, 6.0);
  for (auto _ : state) benchmark::DoNotOptimize(train_operators(spec, net, train, grid));
  state.SetItemsProcessed(state.iterations() * train.t_max);
}
BENCHMARK(BM_OperatorEpochs)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_OracleSpinBoson(benchmark::State& state) {
  const SystemSpec spec = spin_boson_spec(BathParams{});
  const TimeGrid grid(201, 6.0);
  for (auto _ : state) benchmark::DoNotOptimize(integrate_system(spec, ket0_state(), grid, 8));
}
BENCHMARK(BM_OracleSpinBoson)->Unit(benchmark::kMillisecond);

void BM_OracleXxz(benchmark::State& state) {
  const SystemSpec spec = xxz_spec(2.0, 0.5, BathParams{0.1, 0.4, 20.0});
  const TimeGrid grid(401, 6.0);
  for (auto _ : state) benchmark::DoNotOptimize(integrate_system(spec, bell_state(), grid, 8));
}
BENCHMARK(BM_OracleXxz)->Unit(benchmark::kMillisecond);

void BM_HermitianEigen(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexMatrix a(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(u(rng), u(rng));
  const ComplexMatrix h = (a + a.adjoint()) * 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_eigendecompose(h));
}
BENCHMARK(BM_HermitianEigen)->Arg(2)->Arg(4);

void BM_TotalVariation(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd f(16, 401);
  for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = n(rng);
  for (auto _ : state) benchmark::DoNotOptimize(evolution_regularizer(f, 0.01, 0.002));
}
BENCHMARK(BM_TotalVariation);

}  // namespace
}  // namespace fpinn

BENCHMARK_MAIN();
