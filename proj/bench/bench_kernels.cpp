// Copyright 2026 The dpadmm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <vector>

#include "dpadmm/data_ingest.hpp"
#include "dpadmm/kernels.hpp"
#include "dpadmm/solvers.hpp"

namespace {

using dpadmm::Exec;

// One Adult-sized shard pool: 40000 rows in d = 104 are the full training set.
const dpadmm::Dataset& pooled(int rows) {
  static std::vector<std::pair<int, dpadmm::Dataset>> cache;
  for (const auto& [r, d] : cache) {
    if (r == rows) return d;
  }
  auto shards = dpadmm::make_synthetic(1, rows, 104, 1.0, 11);
  cache.emplace_back(rows, dpadmm::pool(shards));
  return cache.back().second;
}

template <Exec kExec>
void BM_LossGrad(benchmark::State& state) {
  const auto& data = pooled(static_cast<int>(state.range(0)));
  dpadmm::ModelMatrix w = dpadmm::ModelMatrix::Constant(104, 1, 0.01);
  dpadmm::ModelMatrix g;
  for (auto _ : state) {
    double v = dpadmm::kernels::evaluate(kExec, dpadmm::LossKind::kBinaryLogistic,
                                         data.features, data.labels, w, &g);
    benchmark::DoNotOptimize(v);
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LossGrad<Exec::kSerial>)->Arg(400)->Arg(4000)->Arg(40000);
BENCHMARK(BM_LossGrad<Exec::kParallel>)->Arg(400)->Arg(4000)->Arg(40000);

template <Exec kExec>
void BM_DpadmmRun(benchmark::State& state) {
  auto shards = dpadmm::make_synthetic(static_cast<int>(state.range(0)), 400, 104, 1.0, 3);
  dpadmm::Problem problem;
  problem.shards = shards;
  problem.loss = dpadmm::make_loss(dpadmm::LossKind::kBinaryLogistic, 104, 1);
  problem.reg = dpadmm::make_reg(dpadmm::RegKind::kL2, 1e-6 * state.range(0),
                                 static_cast<int>(state.range(0)), 104, 1);
  dpadmm::HyperParams hp;
  hp.t = 20;
  hp.c_w = 89;
  hp.budget = dpadmm::PrivacyBudget{0.1, 1e-3};
  for (auto _ : state) {
    auto trace = dpadmm::run_dpadmm(problem, hp, dpadmm::Schedule::kSmooth, 7,
                                    {kExec, false});
    benchmark::DoNotOptimize(trace.global.w.data());
  }
}
BENCHMARK(BM_DpadmmRun<Exec::kSerial>)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DpadmmRun<Exec::kParallel>)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
