// Copyright 2026 The qrc-floquet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>

#include <benchmark/benchmark.h>

#include "qrc/dynamics.hpp"
#include "qrc/network.hpp"
#include "qrc/onn.hpp"

namespace {

using namespace qrc;

DriveParameters drive(int n) {
  DriveParameters p;
  p.num_qubits = n;
  return p;
}

void BM_FloquetOperator(benchmark::State& state) {
  const auto p = drive(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(floquet_operator(p));
}
BENCHMARK(BM_FloquetOperator)->DenseRange(5, 11, 2)->Unit(benchmark::kMillisecond);

void BM_Propagator(benchmark::State& state) {
  const CMatrix f = floquet_operator(drive(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(propagator(f, 50));
}
BENCHMARK(BM_Propagator)->DenseRange(5, 11, 2)->Unit(benchmark::kMillisecond);

void BM_EvolveBatch(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CMatrix u = propagator(drive(n));
  const CMatrix states = CMatrix::Random(u.rows(), 512);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_batch(states, u));
  state.SetItemsProcessed(state.iterations() * 512);
}
BENCHMARK(BM_EvolveBatch)->DenseRange(7, 11, 2)->Unit(benchmark::kMillisecond);

void BM_EffectiveHamiltonian(benchmark::State& state) {
  const CMatrix f = floquet_operator(drive(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(effective_hamiltonian(f));
}
BENCHMARK(BM_EffectiveHamiltonian)->DenseRange(5, 9, 2)->Unit(benchmark::kMillisecond);

void BM_TrainEpoch(benchmark::State& state) {
  const Eigen::Index m = state.range(0);
  const Eigen::Index rows = 2000;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  RMatrix x(rows, m);
  for (auto& v : x.reshaped()) v = g(rng);
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(rows));
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<std::uint8_t>(i % 10);
  TrainConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(OnnModel::random(m, 1), {x, labels}, {x, labels}, cfg));
  }
  state.SetItemsProcessed(state.iterations() * rows);
}
BENCHMARK(BM_TrainEpoch)->Arg(128)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
