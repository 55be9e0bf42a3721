/*
 * Copyright 2026 The locstruct Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <vector>

#include <benchmark/benchmark.h>

#include "locstruct/bench.hpp"
#include "locstruct/decoder.hpp"
#include "locstruct/kernels.hpp"
#include "locstruct/locality.hpp"
#include "locstruct/training.hpp"

namespace locstruct {
namespace {

constexpr std::size_t kBlockDim = 10;
constexpr std::size_t kParts = 16;

SyntheticDataset make_data(std::size_t n) {
  SyntheticConfig cfg;
  cfg.num_parts = kParts;
  cfg.block_dim = kBlockDim;
  cfg.gamma = 2.0;
  cfg.n_train = n;
  cfg.n_test = 8;
  Rng rng = make_stream(1, {n});
  return gen_synthetic_dataset(cfg, rng);
}

const PartScheme& scheme() {
  static const PartScheme s = PartScheme::vector_blocks(kBlockDim, kParts);
  return s;
}

void BM_GramGaussian(benchmark::State& state) {
  const auto data = make_data(static_cast<std::size_t>(state.range(0)));
  std::vector<Object> inputs;
  for (const auto& s : data.train) inputs.push_back(s.x);
  std::vector<Anchor> anchors;
  for (const auto& x : inputs)
    for (PartIndex p = 0; p < kParts; ++p) anchors.push_back({&x, p});
  const auto prepared = prepare_anchors(anchors, scheme());
  const auto kernel = Kernel::restriction(Kernel::gaussian_parts(2.0));
  for (auto _ : state) benchmark::DoNotOptimize(gram_matrix(kernel, prepared));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(anchors.size() * anchors.size()));
}
BENCHMARK(BM_GramGaussian)->Arg(8)->Arg(32)->Arg(64);

void BM_FitDense(benchmark::State& state) {
  const auto data = make_data(static_cast<std::size_t>(state.range(0)));
  const auto aux = full_auxiliary(data.train, scheme());
  const auto kernel = Kernel::restriction(Kernel::gaussian_parts(2.0));
  for (auto _ : state)
    benchmark::DoNotOptimize(fit_alpha(data.train, aux, kernel, 1e-3, scheme()));
}
BENCHMARK(BM_FitDense)->Arg(8)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_FitLinearFeatures(benchmark::State& state) {
  const auto data = make_data(static_cast<std::size_t>(state.range(0)));
  const auto aux = full_auxiliary(data.train, scheme());
  const auto kernel = Kernel::restriction(Kernel::linear_parts());
  for (auto _ : state)
    benchmark::DoNotOptimize(
        fit_alpha(data.train, aux, kernel, 1e-3, scheme(), {SolverKind::kLinearFeatures}));
}
BENCHMARK(BM_FitLinearFeatures)->Arg(32)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_DecodeLeastSquares(benchmark::State& state) {
  const auto data = make_data(static_cast<std::size_t>(state.range(0)));
  const auto model = fit_alpha(data.train, full_auxiliary(data.train, scheme()),
                               Kernel::restriction(Kernel::gaussian_parts(2.0)), 1e-3, scheme());
  const auto pi = PartDistribution::uniform(kParts);
  for (auto _ : state) {
    for (const auto& s : data.test)
      benchmark::DoNotOptimize(decode_least_squares(make_decode_problem(model, s.x, pi)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(data.test.size()));
}
BENCHMARK(BM_DecodeLeastSquares)->Arg(8)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_DecodeSgm(benchmark::State& state) {
  const auto data = make_data(16);
  const auto model = fit_alpha(data.train, full_auxiliary(data.train, scheme()),
                               Kernel::restriction(Kernel::gaussian_parts(2.0)), 1e-3, scheme());
  const auto problem = make_decode_problem(model, data.test[0].x, PartDistribution::uniform(kParts));
  SgmOptions options;
  options.iterations = static_cast<std::size_t>(state.range(0));
  const Loss loss(Loss::Kind::kSquaredVector);
  for (auto _ : state) {
    Rng rng(3);
    benchmark::DoNotOptimize(decode_sgm(problem, loss, options, rng));
  }
}
BENCHMARK(BM_DecodeSgm)->Arg(2000)->Arg(20000)->Unit(benchmark::kMicrosecond);

void BM_CovMap(benchmark::State& state) {
  const auto data = make_data(static_cast<std::size_t>(state.range(0)));
  std::vector<Object> inputs;
  for (const auto& s : data.train) inputs.push_back(s.x);
  const auto sim = Similarity::squared_kernel(Kernel::gaussian_parts(2.0));
  for (auto _ : state) benchmark::DoNotOptimize(empirical_cov_map(inputs, scheme(), sim));
}
BENCHMARK(BM_CovMap)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace locstruct

BENCHMARK_MAIN();
